#pragma once

#include <string>
#include <vector>

#include "contactk/cli/reports.hpp"
#include "contactk/cli/session.hpp"

namespace contactk::cli {

inline constexpr double kDynamicsTolerance = 1e-6;  // K residual, Herglotz-Dirac, dissipation
inline constexpr double kDriftTolerance = 1e-8;     // Lagrangian constraint values

struct VerifyOptions {
  int max_iter = 16;
  /// Adds 1 to the first momentum component b_0 of K before the checks.
  bool perturb_k = false;
  /// Runs the [simulate] block when present.
  bool numeric = true;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> verify(const LoadedModel& lm, const VerifyOptions& options = {});
bool all_passed(const std::vector<CheckResult>& results);
Json verify_report(const LoadedModel& lm, const std::vector<CheckResult>& results);

}  // namespace contactk::cli
