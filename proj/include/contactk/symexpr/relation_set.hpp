#pragma once

#include <vector>

#include "contactk/symexpr/expr.hpp"

namespace contactk::sym {

/// A set of relations {r_k = 0} kept in solved triangular form x_k = e_k,
/// where each x_k is a chart coordinate in which r_k is affine. Deciding
/// whether a function vanishes on the zero set reduces to substituting the
/// bindings and zero-testing the result.
class RelationSet {
 public:
  /// `eliminable` lists the coordinates that may be solved for, most
  /// preferred first.
  explicit RelationSet(std::vector<Symbol> eliminable);

  enum class AddResult { Added, Dependent };

  /// Throws PivotAmbiguity if the reduced relation is nonzero but affine in
  /// no eligible coordinate with a nonzero coefficient.
  AddResult add(const Expr& relation);

  Expr reduce(const Expr& e) const;
  bool vanishes(const Expr& e) const;

  const Bindings& bindings() const { return bindings_; }
  const std::vector<Symbol>& solved_order() const { return solved_; }

 private:
  std::vector<Symbol> eliminable_;
  Bindings bindings_;
  std::vector<Symbol> solved_;
};

}  // namespace contactk::sym
