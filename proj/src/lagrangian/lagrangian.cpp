#include "contactk/lagrangian/lagrangian.hpp"

#include <set>

#include "contactk/error.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::lag {

using sym::SymbolRole;

namespace {

Expr L_v(const LagrangianModel& m, std::size_t i) { return sym::diff(m.L, m.chart->fibers()[i]); }

std::vector<Symbol> scratch_unknowns(const std::string& prefix, std::size_t count) {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(prefix + std::to_string(i), SymbolRole::Auxiliary);
  return out;
}

std::vector<Expr> scratch_exprs(const std::vector<Symbol>& symbols) {
  std::vector<Expr> out;
  for (const auto& s : symbols) out.emplace_back(s);
  return out;
}

}  // namespace

LagrangianModel make_model(std::string name, ChartPtr chart, Expr L) {
  if (chart->kind() != geo::ChartKind::Velocity) throw ModelError("a Lagrangian needs a velocity chart");
  std::set<std::string> known;
  for (const auto& s : chart->coordinates()) known.insert(s.name);
  for (const auto& s : chart->parameters()) known.insert(s.name);
  for (const auto& s : sym::free_symbols(L)) {
    if (s.role == SymbolRole::Momentum || s.role == SymbolRole::FreeFunction) {
      throw ModelError("Lagrangian may not contain " + std::string(sym::to_string(s.role)) + " symbol " + s.name);
    }
    if (!known.contains(s.name)) throw ModelError("Lagrangian uses a symbol outside its chart: " + s.name);
  }
  return LagrangianModel{std::move(name), std::move(chart), std::move(L)};
}

Expr energy(const LagrangianModel& m) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < m.chart->n(); ++i) terms.push_back(m.chart->fiber(i) * L_v(m, i));
  terms.push_back(-m.L);
  return sym::sum(terms);
}

OneForm contact_one_form(const LagrangianModel& m) {
  OneForm out(m.chart);
  for (std::size_t i = 0; i < m.chart->n(); ++i) out.c[m.chart->position_index(i)] = -L_v(m, i);
  out.c[m.chart->action_index()] = Expr(1);
  return out;
}

TwoForm exterior_derivative(const OneForm& w) { return geo::d(w); }

OneForm LegendreMap::pull(const OneForm& phase_form) const { return geo::pullback(phase_form, bindings, source); }

LegendreMap legendre_map(const LagrangianModel& m) {
  LegendreMap fl;
  fl.source = m.chart;
  fl.target = geo::phase_chart_for(*m.chart);
  for (std::size_t i = 0; i < m.chart->n(); ++i) fl.bindings.emplace(fl.target->fibers()[i].name, L_v(m, i));
  if (!geo::is_zero(fl.pull(geo::canonical_one_form(fl.target)) - contact_one_form(m))) {
    throw Error("Legendre map does not pull the canonical contact form back to eta_L");
  }
  return fl;
}

Matrix hessian(const LagrangianModel& m) {
  const std::size_t n = m.chart->n();
  Matrix w(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Expr li = L_v(m, i);
    for (std::size_t j = 0; j < n; ++j) w[i][j] = sym::diff(li, m.chart->fibers()[j]);
  }
  return w;
}

Regularity classify_regularity(const LagrangianModel& m) {
  const std::size_t n = m.chart->n();
  const Matrix w = hessian(m);
  const auto k = scratch_unknowns("_k", n);
  const auto kx = scratch_exprs(k);
  std::vector<Expr> eqs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> row;
    for (std::size_t j = 0; j < n; ++j) row.push_back(w[i][j] * kx[j]);
    eqs.push_back(sym::sum(row));
  }
  const auto solved = sym::solve_linear(eqs, k);
  Regularity out;
  out.rank = n - solved.free_parameters.size();
  out.regular = solved.free_parameters.empty();
  for (const auto& fp : solved.free_parameters) {
    sym::Bindings unit;
    for (const auto& other : solved.free_parameters) unit.emplace(other.symbol.name, Expr(other.symbol == fp.symbol ? 1 : 0));
    std::vector<Expr> direction;
    for (const auto& u : k) direction.push_back(sym::substitute(solved.solution.at(u.name), unit));
    out.kernel.push_back(std::move(direction));
  }
  return out;
}

VectorField reeb_field(const LagrangianModel& m) {
  if (!classify_regularity(m).regular) throw SingularModel("the Reeb field R_L requires a regular Lagrangian");
  const std::size_t n = m.chart->n();
  const Matrix w = hessian(m);
  const auto x = scratch_unknowns("_r", n);
  const auto xe = scratch_exprs(x);
  std::vector<Expr> eqs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> row;
    for (std::size_t j = 0; j < n; ++j) row.push_back(w[i][j] * xe[j]);
    row.push_back(-sym::diff(L_v(m, i), m.chart->action()));
    eqs.push_back(sym::sum(row));
  }
  const auto solved = sym::solve_linear(eqs, x);
  VectorField r(m.chart);
  for (std::size_t i = 0; i < n; ++i) r.c[m.chart->fiber_index(i)] = -solved.solution.at(x[i].name);
  r.c[m.chart->action_index()] = Expr(1);

  const OneForm eta = contact_one_form(m);
  if (!geo::is_zero(geo::interior(r, geo::d(eta))) || !sym::is_zero(geo::interior(r, eta) - Expr(1))) {
    throw Error("computed Reeb field fails its defining equations");
  }
  return r;
}

std::vector<Expr> herglotz_el_residuals(const LagrangianModel& m, const std::vector<Expr>& accelerations,
                                        const Expr& sdot) {
  const auto& ch = *m.chart;
  const std::size_t n = ch.n();
  if (accelerations.size() != n) throw Error("one acceleration per degree of freedom is required");
  const Matrix w = hessian(m);
  const Expr L_s = sym::diff(m.L, ch.action());
  std::vector<Expr> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Expr li = L_v(m, i);
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < n; ++j) {
      terms.push_back(w[i][j] * accelerations[j]);
      terms.push_back(sym::diff(li, ch.positions()[j]) * ch.fiber(j));
    }
    terms.push_back(sym::diff(li, ch.action()) * m.L);
    terms.push_back(-sym::diff(m.L, ch.positions()[i]));
    terms.push_back(-L_s * li);
    out.push_back(sym::sum(terms));
  }
  out.push_back(sdot - m.L);
  return out;
}

LagrangianVectorField lagrangian_vector_field(const LagrangianModel& m) {
  const auto& chart = m.chart;
  const std::size_t dim = chart->dimension();
  std::vector<Symbol> unknowns;
  for (std::size_t a = 0; a < dim; ++a) unknowns.emplace_back("_X_" + chart->coordinate(a).name);
  VectorField x(chart, scratch_exprs(unknowns));

  const OneForm eta = contact_one_form(m);
  const Expr e = energy(m);
  const Expr L_s = sym::diff(m.L, chart->action());
  const OneForm lhs = geo::interior(x, geo::d(eta));
  const OneForm rhs = geo::d(e, chart) + L_s * eta;

  std::vector<Expr> eqs;
  for (std::size_t b = 0; b < dim; ++b) eqs.push_back(lhs.c[b] - rhs.c[b]);
  eqs.push_back(geo::interior(x, eta) + e);
  for (std::size_t i = 0; i < chart->n(); ++i) {
    eqs.push_back(x.c[chart->position_index(i)] - chart->fiber(i));
  }
  sym::SolveOptions opts;
  for (const auto& s : chart->coordinates()) opts.reserved_names.insert(s.name);
  for (const auto& s : chart->parameters()) opts.reserved_names.insert(s.name);
  auto solved = sym::solve_linear(eqs, unknowns, opts);

  LagrangianVectorField out{VectorField(chart), solved.free_parameters, solved.consistency_residuals};
  for (std::size_t a = 0; a < dim; ++a) out.field.c[a] = solved.solution.at(unknowns[a].name);
  return out;
}

}  // namespace contactk::lag
