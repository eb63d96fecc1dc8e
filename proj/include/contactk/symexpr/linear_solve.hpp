#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "contactk/symexpr/expr.hpp"

namespace contactk::sym {

struct FreeParameter {
  Symbol symbol;   // fresh, role FreeFunction
  Symbol unknown;  // the unknown column it stands for
};

struct LinearSolveResult {
  std::vector<Symbol> unknowns;
  Bindings solution;    // unknown -> affine expression in the free parameters
  Bindings particular;  // solution with every free parameter set to 0
  std::vector<FreeParameter> free_parameters;
  std::vector<Expr> consistency_residuals;  // must vanish for solvability

  bool solvable() const { return consistency_residuals.empty(); }
};

struct SolveOptions {
  std::string free_prefix = "f_";
  std::set<std::string> reserved_names;
};

/// Gauss-Jordan elimination over the expression field. Each equation is
/// read as `eq = 0`. Columns are eliminated in unknown order; a pivot is a
/// nonzero constant if one exists, else the smallest entry that tests
/// nonzero. Throws AffinityError or PivotAmbiguity.
LinearSolveResult solve_linear(std::span<const Expr> equations, std::span<const Symbol> unknowns,
                               const SolveOptions& options = {});

}  // namespace contactk::sym
