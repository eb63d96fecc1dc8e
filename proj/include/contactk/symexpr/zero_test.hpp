#pragma once

#include <cstdint>
#include <string_view>

#include "contactk/symexpr/expr.hpp"

namespace contactk::sym {

enum class ZeroVerdict {
  ZeroCanonical,
  ZeroProbabilistic,
  NonZero,
  Indeterminate,  // vanished at some sample points but not all
};

std::string_view to_string(ZeroVerdict v);

inline constexpr std::uint64_t kDefaultSeed = 322377415;

std::uint64_t default_seed();
void set_default_seed(std::uint64_t seed);

struct ZeroTestOptions {
  std::uint64_t seed = default_seed();
  int points = 32;
  long double tolerance = 1e-9L;
  int retries = 10;
};

/// Canonical check first, then evaluation at random points with every
/// symbol drawn from [-3,-1/3] u [1/3,3]. The tolerance is relative to the
/// magnitude of the evaluated terms. Throws EvaluationDomainError when a
/// point cannot be evaluated after the allowed retries.
ZeroVerdict zero_test(const Expr& e, const ZeroTestOptions& options = {});

/// True for ZeroCanonical and ZeroProbabilistic.
bool is_zero(const Expr& e);

/// True only for the NonZero verdict.
bool is_nonzero(const Expr& e);

}  // namespace contactk::sym
