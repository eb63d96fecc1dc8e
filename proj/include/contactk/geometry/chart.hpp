#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contactk/symexpr/expr.hpp"
#include "contactk/symexpr/parser.hpp"

namespace contactk::geo {

using sym::Expr;
using sym::Symbol;

enum class ChartKind { Velocity, Phase };

/// Coordinates (q^1..q^n, fibers, s) plus model parameters. Coordinate
/// order is positions, then fibers, then the action.
class CoordinateChart {
 public:
  CoordinateChart(std::vector<Symbol> positions, std::vector<Symbol> fibers, Symbol action,
                  std::vector<Symbol> parameters, ChartKind kind);

  const std::vector<Symbol>& positions() const { return positions_; }
  const std::vector<Symbol>& fibers() const { return fibers_; }
  const Symbol& action() const { return action_; }
  const std::vector<Symbol>& parameters() const { return parameters_; }
  ChartKind kind() const { return kind_; }

  std::size_t n() const { return positions_.size(); }
  std::size_t dimension() const { return coordinates_.size(); }
  const std::vector<Symbol>& coordinates() const { return coordinates_; }
  const Symbol& coordinate(std::size_t i) const { return coordinates_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  std::size_t position_index(std::size_t i) const { return i; }
  std::size_t fiber_index(std::size_t i) const { return n() + i; }
  std::size_t action_index() const { return 2 * n(); }

  Expr q(std::size_t i) const { return Expr(positions_[i]); }
  Expr fiber(std::size_t i) const { return Expr(fibers_[i]); }
  Expr s() const { return Expr(action_); }

  /// Coordinates and parameters, for parsing.
  sym::SymbolTable symbol_table() const;

 private:
  std::vector<Symbol> positions_;
  std::vector<Symbol> fibers_;
  Symbol action_;
  std::vector<Symbol> parameters_;
  ChartKind kind_;
  std::vector<Symbol> coordinates_;
};

using ChartPtr = std::shared_ptr<const CoordinateChart>;

std::string velocity_name(std::string_view position);
std::string momentum_name(std::string_view position);

/// (q, v_q, s) for the given position names.
ChartPtr make_velocity_chart(const std::vector<std::string>& positions, const std::vector<std::string>& parameters,
                             const std::string& action = "s");

/// The phase chart (q, p_q, s) sharing positions, action and parameters.
ChartPtr phase_chart_for(const CoordinateChart& velocity);

/// Darboux chart with positions q1..qn (just q when n = 1) and momenta p_<q>.
ChartPtr canonical_phase_chart(std::size_t n, const std::vector<std::string>& parameters = {});

}  // namespace contactk::geo
