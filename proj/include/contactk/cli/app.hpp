#pragma once

#include <ostream>

namespace contactk::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitVerificationFailed = 2,
  kExitInputError = 3,
  kExitNeedsUser = 4,
};

/// `contactk analyze|constraints|evolution|simulate|verify <file>
/// [--seed N] [--json PATH] [--csv PATH] [--max-iter N]`.
/// The JSON report goes to `out` and, with --json, to PATH as well.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace contactk::cli
