#include "contactk/geometry/chart.hpp"

#include <set>

#include "contactk/error.hpp"

namespace contactk::geo {

using sym::SymbolRole;

CoordinateChart::CoordinateChart(std::vector<Symbol> positions, std::vector<Symbol> fibers, Symbol action,
                                 std::vector<Symbol> parameters, ChartKind kind)
    : positions_(std::move(positions)),
      fibers_(std::move(fibers)),
      action_(std::move(action)),
      parameters_(std::move(parameters)),
      kind_(kind) {
  if (positions_.size() != fibers_.size()) throw ModelError("chart needs as many fibers as positions");
  coordinates_ = positions_;
  coordinates_.insert(coordinates_.end(), fibers_.begin(), fibers_.end());
  coordinates_.push_back(action_);
  std::set<std::string> seen;
  for (const auto& s : coordinates_) {
    if (!seen.insert(s.name).second) throw ModelError("duplicate chart symbol: " + s.name);
  }
  for (const auto& s : parameters_) {
    if (!seen.insert(s.name).second) throw ModelError("duplicate chart symbol: " + s.name);
  }
}

std::optional<std::size_t> CoordinateChart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    if (coordinates_[i].name == name) return i;
  }
  return std::nullopt;
}

sym::SymbolTable CoordinateChart::symbol_table() const {
  sym::SymbolTable t;
  for (const auto& s : coordinates_) t.add(s);
  for (const auto& s : parameters_) t.add(s);
  return t;
}

std::string velocity_name(std::string_view position) { return "v_" + std::string(position); }
std::string momentum_name(std::string_view position) { return "p_" + std::string(position); }

ChartPtr make_velocity_chart(const std::vector<std::string>& positions, const std::vector<std::string>& parameters,
                             const std::string& action) {
  std::vector<Symbol> q;
  std::vector<Symbol> v;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    q.emplace_back(positions[i], SymbolRole::Position, static_cast<int>(i));
    v.emplace_back(velocity_name(positions[i]), SymbolRole::Velocity, static_cast<int>(i));
  }
  std::vector<Symbol> params;
  for (const auto& p : parameters) params.emplace_back(p, SymbolRole::Parameter);
  return std::make_shared<const CoordinateChart>(std::move(q), std::move(v), Symbol(action, SymbolRole::Action),
                                                 std::move(params), ChartKind::Velocity);
}

ChartPtr phase_chart_for(const CoordinateChart& velocity) {
  std::vector<Symbol> p;
  for (std::size_t i = 0; i < velocity.n(); ++i) {
    p.emplace_back(momentum_name(velocity.positions()[i].name), SymbolRole::Momentum, static_cast<int>(i));
  }
  return std::make_shared<const CoordinateChart>(velocity.positions(), std::move(p), velocity.action(),
                                                 velocity.parameters(), ChartKind::Phase);
}

ChartPtr canonical_phase_chart(std::size_t n, const std::vector<std::string>& parameters) {
  std::vector<std::string> names;
  if (n == 1) {
    names.push_back("q");
  } else {
    for (std::size_t i = 1; i <= n; ++i) names.push_back("q" + std::to_string(i));
  }
  return phase_chart_for(*make_velocity_chart(names, parameters));
}

}  // namespace contactk::geo
