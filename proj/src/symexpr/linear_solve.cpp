#include "contactk/symexpr/linear_solve.hpp"

#include <optional>

#include "contactk/error.hpp"
#include "contactk/symexpr/parser.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::sym {

namespace {

bool depends_on_any(const Expr& e, std::span<const Symbol> unknowns) {
  for (const auto& u : unknowns) {
    if (depends_on(e, u.name)) return true;
  }
  return false;
}

std::set<std::string> names_in(std::span<const Expr> equations) {
  std::set<std::string> out;
  for (const auto& eq : equations) {
    for (const auto& s : free_symbols(eq)) out.insert(s.name);
  }
  return out;
}

}  // namespace

LinearSolveResult solve_linear(std::span<const Expr> equations, std::span<const Symbol> unknowns,
                               const SolveOptions& options) {
  const std::size_t rows = equations.size();
  const std::size_t cols = unknowns.size();
  std::vector<std::vector<Expr>> a(rows, std::vector<Expr>(cols));
  std::vector<Expr> b(rows);

  for (std::size_t i = 0; i < rows; ++i) {
    Expr linear_part;
    for (std::size_t j = 0; j < cols; ++j) {
      Expr c = diff(equations[i], unknowns[j]);
      if (depends_on_any(c, unknowns)) {
        throw AffinityError("equation is not affine in " + unknowns[j].name + ": " + to_string(equations[i]));
      }
      a[i][j] = c;
      linear_part += c * Expr(unknowns[j]);
    }
    Expr rest = equations[i] - linear_part;
    if (depends_on_any(rest, unknowns)) {
      throw AffinityError("equation is not affine in the unknowns: " + to_string(equations[i]));
    }
    b[i] = -rest;
  }

  std::vector<std::optional<std::size_t>> pivot_row_of_col(cols);
  std::vector<bool> row_used(rows, false);

  for (std::size_t j = 0; j < cols; ++j) {
    std::optional<std::size_t> constant_row;
    std::optional<std::size_t> symbolic_row;
    std::size_t symbolic_size = 0;
    bool ambiguous = false;
    for (std::size_t i = 0; i < rows; ++i) {
      if (row_used[i] || a[i][j].is_zero()) continue;
      if (a[i][j].is_constant()) {
        if (!constant_row) constant_row = i;
        continue;
      }
      switch (zero_test(a[i][j])) {
        case ZeroVerdict::ZeroCanonical:
        case ZeroVerdict::ZeroProbabilistic:
          a[i][j] = Expr();
          break;
        case ZeroVerdict::NonZero: {
          const std::size_t size = node_count(a[i][j]);
          if (!symbolic_row || size < symbolic_size) {
            symbolic_row = i;
            symbolic_size = size;
          }
          break;
        }
        case ZeroVerdict::Indeterminate:
          ambiguous = true;
          break;
      }
    }
    std::optional<std::size_t> p = constant_row ? constant_row : symbolic_row;
    if (!p) {
      if (ambiguous) {
        throw PivotAmbiguity("cannot decide whether a pivot candidate for " + unknowns[j].name +
                             " vanishes");
      }
      continue;
    }
    const std::size_t r = *p;
    row_used[r] = true;
    pivot_row_of_col[j] = r;
    const Expr pivot = a[r][j];
    if (!pivot.is_one()) {
      for (std::size_t k = 0; k < cols; ++k) {
        if (!a[r][k].is_zero()) a[r][k] = a[r][k] / pivot;
      }
      b[r] = b[r] / pivot;
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][j].is_zero()) continue;
      const Expr factor = a[i][j];
      for (std::size_t k = 0; k < cols; ++k) {
        if (!a[r][k].is_zero()) a[i][k] = a[i][k] - factor * a[r][k];
      }
      a[i][j] = Expr();
      b[i] = b[i] - factor * b[r];
    }
  }

  LinearSolveResult result;
  result.unknowns.assign(unknowns.begin(), unknowns.end());

  std::set<std::string> taken = names_in(equations);
  taken.insert(options.reserved_names.begin(), options.reserved_names.end());
  for (const auto& u : unknowns) taken.insert(u.name);

  Bindings free_values;
  int next_index = 1;
  for (std::size_t j = 0; j < cols; ++j) {
    if (pivot_row_of_col[j]) continue;
    std::string name;
    do {
      name = options.free_prefix + std::to_string(next_index++);
    } while (taken.contains(name) || is_reserved_name(name));
    taken.insert(name);
    Symbol f(name, SymbolRole::FreeFunction, next_index - 1);
    result.free_parameters.push_back({f, unknowns[j]});
    free_values.emplace(unknowns[j].name, Expr(f));
  }

  for (std::size_t j = 0; j < cols; ++j) {
    if (!pivot_row_of_col[j]) {
      result.solution.emplace(unknowns[j].name, free_values.at(unknowns[j].name));
      result.particular.emplace(unknowns[j].name, Expr());
      continue;
    }
    const std::size_t r = *pivot_row_of_col[j];
    Expr value = b[r];
    Expr particular = b[r];
    for (std::size_t k = 0; k < cols; ++k) {
      if (k == j || pivot_row_of_col[k] || a[r][k].is_zero()) continue;
      value -= a[r][k] * free_values.at(unknowns[k].name);
    }
    result.solution.emplace(unknowns[j].name, value);
    result.particular.emplace(unknowns[j].name, particular);
  }

  for (std::size_t i = 0; i < rows; ++i) {
    if (row_used[i]) continue;
    Expr residual = -b[i];
    if (!is_zero(residual)) result.consistency_residuals.push_back(residual);
  }
  return result;
}

}  // namespace contactk::sym
