#include "contactk/hamiltonian/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "contactk/error.hpp"
#include "contactk/symexpr/compiled.hpp"
#include "contactk/symexpr/normalize.hpp"
#include "contactk/symexpr/relation_set.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::ham {

using sym::SymbolRole;

namespace {

std::vector<Symbol> component_unknowns(const ChartPtr& chart, const std::string& prefix) {
  std::vector<Symbol> out;
  for (const auto& s : chart->coordinates()) out.emplace_back(prefix + s.name, SymbolRole::Auxiliary);
  return out;
}

VectorField unknown_field(const ChartPtr& chart, const std::vector<Symbol>& unknowns) {
  VectorField x(chart);
  for (std::size_t a = 0; a < unknowns.size(); ++a) x.c[a] = Expr(unknowns[a]);
  return x;
}

sym::SolveOptions options_for(const ChartPtr& chart) {
  sym::SolveOptions opts;
  for (const auto& s : chart->coordinates()) opts.reserved_names.insert(s.name);
  for (const auto& s : chart->parameters()) opts.reserved_names.insert(s.name);
  return opts;
}

VectorField field_from(const ChartPtr& chart, const std::vector<Symbol>& unknowns, const sym::Bindings& solution) {
  VectorField x(chart);
  for (std::size_t a = 0; a < unknowns.size(); ++a) x.c[a] = solution.at(unknowns[a].name);
  return x;
}

/// Fibers first, then positions, then the action.
std::vector<Symbol> elimination_order(const ChartPtr& chart) {
  std::vector<Symbol> out = chart->fibers();
  out.insert(out.end(), chart->positions().begin(), chart->positions().end());
  out.push_back(chart->action());
  return out;
}

std::vector<Expr> independent_constraints(std::vector<Expr> candidates, const ChartPtr& chart) {
  for (auto& c : candidates) c = sym::normalize(c);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Expr& a, const Expr& b) { return sym::node_count(a) < sym::node_count(b); });
  sym::RelationSet relations(elimination_order(chart));
  std::vector<Expr> out;
  for (const auto& c : candidates) {
    try {
      if (relations.add(c) == sym::RelationSet::AddResult::Added) out.push_back(c);
    } catch (const PivotAmbiguity&) {
      if (!relations.vanishes(c)) out.push_back(c);
    }
  }
  return out;
}

}  // namespace

HamiltonianModel make_model(ChartPtr chart, Expr H) {
  if (chart->kind() != geo::ChartKind::Phase) throw ModelError("a Hamiltonian needs a phase chart");
  std::set<std::string> known;
  for (const auto& s : chart->coordinates()) known.insert(s.name);
  for (const auto& s : chart->parameters()) known.insert(s.name);
  for (const auto& s : sym::free_symbols(H)) {
    if (s.role == SymbolRole::Velocity || s.role == SymbolRole::FreeFunction) {
      throw ModelError("Hamiltonian may not contain " + std::string(sym::to_string(s.role)) + " symbol " + s.name);
    }
    if (!known.contains(s.name)) throw ModelError("Hamiltonian uses a symbol outside its chart: " + s.name);
  }
  OneForm eta = canonical_contact_form(chart);
  return HamiltonianModel{std::move(chart), std::move(H), std::move(eta)};
}

OneForm canonical_contact_form(const ChartPtr& phase) { return geo::canonical_one_form(phase); }

OneForm canonical_contact_form(std::size_t n) { return canonical_contact_form(geo::canonical_phase_chart(n)); }

bool is_canonical(const OneForm& eta) {
  if (eta.chart->kind() != geo::ChartKind::Phase) return false;
  const OneForm ref = geo::canonical_one_form(eta.chart);
  for (std::size_t a = 0; a < ref.c.size(); ++a) {
    if (eta.c[a] != ref.c[a]) return false;
  }
  return true;
}

VectorField hamiltonian_vf_darboux(const Expr& H, const OneForm& eta) {
  if (!is_canonical(eta)) throw NonCanonicalForm("the Darboux formula needs eta = ds - p dq");
  const auto& ch = *eta.chart;
  const Expr H_s = sym::diff(H, ch.action());
  VectorField x(eta.chart);
  std::vector<Expr> s_terms{-H};
  for (std::size_t i = 0; i < ch.n(); ++i) {
    const Expr H_p = sym::diff(H, ch.fibers()[i]);
    const Expr H_q = sym::diff(H, ch.positions()[i]);
    x.c[ch.position_index(i)] = H_p;
    x.c[ch.fiber_index(i)] = -(H_q + ch.fiber(i) * H_s);
    s_terms.push_back(ch.fiber(i) * H_p);
  }
  x.c[ch.action_index()] = sym::sum(s_terms);
  return x;
}

RestrictedSurface restrict_to(const ChartPtr& phase, const sym::Bindings& eliminated) {
  RestrictedSurface out{phase, eliminated, {}, geo::pullback(geo::canonical_one_form(phase), eliminated, phase)};
  for (const auto& s : phase->coordinates()) {
    if (!eliminated.contains(s.name)) out.surviving.push_back(s);
  }
  return out;
}

ReebFreeSolution hamiltonian_vf_reeb_free(const Expr& H0, const OneForm& eta0) {
  const auto& chart = eta0.chart;
  const std::size_t dim = chart->dimension();
  const auto unknowns = component_unknowns(chart, "_X_");
  const VectorField x = unknown_field(chart, unknowns);

  const TwoForm lhs = geo::wedge(geo::interior(x, geo::d(eta0)), eta0);
  const TwoForm rhs = geo::wedge(geo::d(H0, chart), eta0);
  std::vector<Expr> eqs;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a + 1; b < dim; ++b) eqs.push_back(lhs.c[a][b] - rhs.c[a][b]);
  }
  eqs.push_back(geo::interior(x, eta0) + H0);

  auto solved = sym::solve_linear(eqs, unknowns, options_for(chart));
  return ReebFreeSolution{field_from(chart, unknowns, solved.solution), solved.free_parameters,
                          independent_constraints(solved.consistency_residuals, chart)};
}

ReebExistence reeb_existence(const OneForm& eta0) {
  const auto& chart = eta0.chart;
  const auto unknowns = component_unknowns(chart, "_R_");
  const VectorField r = unknown_field(chart, unknowns);
  const OneForm i_r = geo::interior(r, geo::d(eta0));
  std::vector<Expr> eqs(i_r.c.begin(), i_r.c.end());
  eqs.push_back(geo::interior(r, eta0) - Expr(1));
  auto solved = sym::solve_linear(eqs, unknowns, options_for(chart));

  ReebExistence out{ReebKind::None, field_from(chart, unknowns, solved.solution), {}, {}};
  out.free_parameters = solved.free_parameters;
  out.inconsistencies = solved.consistency_residuals;
  if (!solved.consistency_residuals.empty()) {
    out.kind = ReebKind::None;
  } else if (solved.free_parameters.empty()) {
    out.kind = ReebKind::Unique;
  } else {
    out.kind = ReebKind::Family;
  }
  return out;
}

void require_contact(const OneForm& eta) {
  const auto& chart = eta.chart;
  const std::size_t dim = chart->dimension();
  if (dim % 2 == 0) throw DegenerateContactForm("a contact form needs an odd-dimensional chart");
  const TwoForm w = geo::d(eta);

  std::vector<Expr> entries;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) entries.push_back(w.c[a][b] + eta.c[a] * eta.c[b]);
  }
  std::set<std::string> names;
  for (const auto& e : entries) {
    for (const auto& s : sym::free_symbols(e)) names.insert(s.name);
  }
  const std::vector<std::string> vars(names.begin(), names.end());
  const sym::CompiledSystem sys(entries, vars);

  std::mt19937_64 rng(sym::default_seed());
  std::uniform_real_distribution<double> mag(1.0 / 3.0, 3.0);
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<double> values(vars.size());
    for (auto& v : values) v = (rng() & 1U) ? mag(rng) : -mag(rng);
    const auto flat = sys.evaluate(values);
    Eigen::MatrixXd m(dim, dim);
    double bound = 1.0;
    bool finite = true;
    for (std::size_t a = 0; a < dim; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        const double v = flat[a * dim + b];
        finite = finite && std::isfinite(v);
        m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        row += v * v;
      }
      bound *= std::max(std::sqrt(row), 1e-300);
    }
    if (!finite) continue;
    if (std::fabs(m.determinant()) > 1e-10 * bound) return;
    throw DegenerateContactForm("eta ^ (d eta)^n vanishes at a generic point");
  }
  throw DegenerateContactForm("contact condition could not be evaluated");
}

OneForm bundle_iso_B(const OneForm& eta, const VectorField& x) {
  require_contact(eta);
  return geo::interior(x, geo::d(eta)) + geo::interior(x, eta) * eta;
}

VectorField bundle_iso_B_inverse(const OneForm& eta, const OneForm& alpha) {
  require_contact(eta);
  const auto& chart = eta.chart;
  const auto unknowns = component_unknowns(chart, "_B_");
  const VectorField x = unknown_field(chart, unknowns);
  const OneForm bx = geo::interior(x, geo::d(eta)) + geo::interior(x, eta) * eta;
  std::vector<Expr> eqs;
  for (std::size_t a = 0; a < chart->dimension(); ++a) eqs.push_back(bx.c[a] - alpha.c[a]);
  auto solved = sym::solve_linear(eqs, unknowns, options_for(chart));
  if (!solved.free_parameters.empty() || !solved.consistency_residuals.empty()) {
    throw DegenerateContactForm("B is not invertible for this form");
  }
  return field_from(chart, unknowns, solved.solution);
}

Expr dissipation_residual(const Expr& H, const OneForm& eta) {
  const VectorField x = hamiltonian_vf_darboux(H, eta);
  return geo::apply(x, H) + sym::diff(H, eta.chart->action()) * H;
}

TwoForm omega_form(const Expr& H, const OneForm& eta) {
  TwoForm out = geo::wedge(geo::d(H, eta.chart), eta);
  const TwoForm deta = geo::d(eta);
  for (std::size_t a = 0; a < out.c.size(); ++a) {
    for (std::size_t b = 0; b < out.c.size(); ++b) out.c[a][b] = out.c[a][b] - H * deta.c[a][b];
  }
  return out;
}

}  // namespace contactk::ham
