#include "contactk/symexpr/relation_set.hpp"

#include <optional>
#include <tuple>

#include "contactk/error.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::sym {

namespace {

int coefficient_class(const Expr& c) {
  if (c.is_constant()) return 0;
  for (const auto& s : free_symbols(c)) {
    if (s.role != SymbolRole::Parameter) return 2;
  }
  return 1;
}

}  // namespace

RelationSet::RelationSet(std::vector<Symbol> eliminable) : eliminable_(std::move(eliminable)) {}

Expr RelationSet::reduce(const Expr& e) const { return substitute(e, bindings_); }

bool RelationSet::vanishes(const Expr& e) const { return is_zero(reduce(e)); }

RelationSet::AddResult RelationSet::add(const Expr& relation) {
  const Expr r = reduce(relation);
  if (is_zero(r)) return AddResult::Dependent;

  using Rank = std::tuple<int, std::size_t, std::size_t>;
  std::optional<Rank> best_rank;
  std::optional<std::size_t> best;
  Expr best_coefficient;
  for (std::size_t idx = 0; idx < eliminable_.size(); ++idx) {
    const Symbol& x = eliminable_[idx];
    if (bindings_.contains(x.name) || !depends_on(r, x.name)) continue;
    const Expr c = diff(r, x);
    if (depends_on(c, x.name) || depends_on(r - c * Expr(x), x.name)) continue;
    if (!is_nonzero(c)) continue;
    Rank rank{coefficient_class(c), node_count(c), idx};
    if (!best_rank || rank < *best_rank) {
      best_rank = rank;
      best = idx;
      best_coefficient = c;
    }
  }
  if (!best) {
    throw PivotAmbiguity("relation is not affine in any eliminable coordinate: " + to_string(r));
  }
  const Symbol& x = eliminable_[*best];
  const Expr value = -(r - best_coefficient * Expr(x)) / best_coefficient;
  const Bindings step{{x.name, value}};
  for (auto& [name, rhs] : bindings_) rhs = substitute(rhs, step);
  bindings_.emplace(x.name, value);
  solved_.push_back(x);
  return AddResult::Added;
}

}  // namespace contactk::sym
