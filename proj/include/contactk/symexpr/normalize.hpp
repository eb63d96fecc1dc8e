#pragma once

#include "contactk/symexpr/expr.hpp"

namespace contactk::sym {

/// Strips overall parameter powers and the rational content, then makes
/// the leading term positive. Idempotent; 0 maps to 0.
Expr normalize(const Expr& e);

/// Equal up to a nonzero constant or parameter factor.
bool same_up_to_factor(const Expr& a, const Expr& b);

}  // namespace contactk::sym
