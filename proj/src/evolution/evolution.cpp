#include "contactk/evolution/evolution.hpp"

#include "contactk/error.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::evo {

using geo::OneForm;
using sym::Symbol;
using sym::SymbolRole;

namespace {

Expr L_v(const LagrangianModel& m, std::size_t i) { return sym::diff(m.L, m.chart->fibers()[i]); }

EvolutionOperator empty_operator(const LagrangianModel& m) {
  EvolutionOperator k{m, lag::legendre_map(m), {}, {}, Expr()};
  k.a.resize(m.chart->n());
  k.b.resize(m.chart->n());
  return k;
}

/// The Darboux field of g on the full phase chart, carried along FL.
VectorField darboux_along(const Expr& g, const LegendreMap& fl) {
  const VectorField x = ham::hamiltonian_vf_darboux(g, ham::canonical_contact_form(fl.target));
  return geo::substitute(x, fl.bindings);
}

}  // namespace

std::vector<Expr> EvolutionOperator::components() const {
  std::vector<Expr> out = a;
  out.insert(out.end(), b.begin(), b.end());
  out.push_back(c);
  return out;
}

EvolutionOperator build_k_direct(const LagrangianModel& m) {
  EvolutionOperator k = empty_operator(m);
  const auto& ch = *m.chart;
  const Expr L_s = sym::diff(m.L, ch.action());
  for (std::size_t i = 0; i < ch.n(); ++i) {
    k.a[i] = ch.fiber(i);
    k.b[i] = sym::diff(m.L, ch.positions()[i]) + L_s * L_v(m, i);
  }
  k.c = m.L;
  return k;
}

EvolutionOperator build_k_via_B(const LagrangianModel& m) {
  EvolutionOperator k = empty_operator(m);
  const auto& vel = m.chart;
  const auto& phase = k.legendre.target;
  const std::size_t n = vel->n();

  std::vector<Symbol> unknowns;
  for (std::size_t i = 0; i < n; ++i) unknowns.emplace_back("_a" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) unknowns.emplace_back("_b" + std::to_string(i));
  unknowns.emplace_back("_c");

  // K as a field on the phase chart whose components are unknowns.
  VectorField kf(phase);
  for (std::size_t i = 0; i < 2 * n + 1; ++i) kf.c[i] = Expr(unknowns[i]);

  const OneForm eta_q = ham::canonical_contact_form(phase);
  const OneForm b_of_k = geo::interior(kf, geo::d(eta_q)) + geo::interior(kf, eta_q) * eta_q;
  const OneForm lhs = geo::pullback(b_of_k, k.legendre.bindings, vel);

  const OneForm eta_l = lag::contact_one_form(m);
  const Expr e_l = lag::energy(m);
  const Expr L_s = sym::diff(m.L, vel->action());
  const OneForm rhs = geo::d(e_l, vel) + (L_s - e_l) * eta_l;

  std::vector<Expr> eqs;
  for (std::size_t i = 0; i < lhs.c.size(); ++i) eqs.push_back(lhs.c[i] - rhs.c[i]);
  for (std::size_t i = 0; i < n; ++i) eqs.push_back(Expr(unknowns[i]) - vel->fiber(i));

  const auto solved = sym::solve_linear(eqs, unknowns);
  if (!solved.free_parameters.empty() || !solved.consistency_residuals.empty()) {
    throw InconsistentResolution("the B-characterization does not determine K uniquely");
  }
  for (std::size_t i = 0; i < n; ++i) {
    k.a[i] = solved.solution.at(unknowns[i].name);
    k.b[i] = solved.solution.at(unknowns[n + i].name);
  }
  k.c = solved.solution.at("_c");
  return k;
}

EvolutionOperator build_k_tulczyjew(const LagrangianModel& m) {
  EvolutionOperator k = empty_operator(m);
  const auto& vel = m.chart;
  const std::size_t n = vel->n();
  const Expr L_s = sym::diff(m.L, vel->action());
  OneForm theta = geo::d(m.L, vel) - L_s * lag::contact_one_form(m);
  theta.c[vel->action_index()] += m.L;

  // (q, v, s, u, p, z) -> (q, p, s, v, u, z)
  for (std::size_t i = 0; i < n; ++i) {
    k.a[i] = vel->fiber(i);
    k.b[i] = theta.c[vel->position_index(i)];
  }
  k.c = theta.c[vel->action_index()];
  for (std::size_t i = 0; i < n; ++i) {
    if (!sym::is_zero(theta.c[vel->fiber_index(i)] - L_v(m, i))) {
      throw Error("Tulczyjew momentum slot disagrees with the Legendre map");
    }
  }
  return k;
}

bool same_operator(const EvolutionOperator& x, const EvolutionOperator& y) {
  const auto cx = x.components();
  const auto cy = y.components();
  if (cx.size() != cy.size()) return false;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (!sym::is_zero(cx[i] - cy[i])) return false;
  }
  return true;
}

Expr k_derive(const EvolutionOperator& k, const Expr& f) {
  const auto& phase = *k.legendre.target;
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < phase.n(); ++i) {
    terms.push_back(k.a[i] * k.legendre.pull(sym::diff(f, phase.positions()[i])));
    terms.push_back(k.b[i] * k.legendre.pull(sym::diff(f, phase.fibers()[i])));
  }
  terms.push_back(k.c * k.legendre.pull(sym::diff(f, phase.action())));
  return sym::sum(terms);
}

VectorField gamma_field(const Expr& g, const LegendreMap& fl) {
  VectorField out(fl.source);
  const auto& phase = *fl.target;
  for (std::size_t i = 0; i < phase.n(); ++i) {
    out.c[fl.source->fiber_index(i)] = fl.pull(sym::diff(g, phase.fibers()[i]));
  }
  return out;
}

MultiplierSolution solve_multipliers(const LagrangianModel& m, const Expr& H, const std::vector<Expr>& primaries) {
  const LegendreMap fl = lag::legendre_map(m);
  if (!sym::is_zero(fl.pull(H) - lag::energy(m))) {
    throw HamiltonianMismatch("FL*H differs from the Lagrangian energy");
  }
  for (const auto& phi : primaries) {
    if (!sym::is_zero(fl.pull(phi))) {
      throw InconsistentResolution("primary constraint does not vanish on the Legendre image: " + sym::to_string(phi));
    }
  }
  const auto& vel = *m.chart;
  const VectorField gamma_h = gamma_field(H, fl);
  std::vector<VectorField> gammas;
  std::vector<Symbol> lambdas;
  for (std::size_t mu = 0; mu < primaries.size(); ++mu) {
    gammas.push_back(gamma_field(primaries[mu], fl));
    lambdas.emplace_back("lambda_" + std::to_string(mu), SymbolRole::Multiplier, static_cast<int>(mu));
  }
  std::vector<Expr> eqs;
  for (std::size_t i = 0; i < vel.n(); ++i) {
    const std::size_t idx = vel.fiber_index(i);
    std::vector<Expr> terms{vel.fiber(i), -gamma_h.c[idx]};
    for (std::size_t mu = 0; mu < primaries.size(); ++mu) terms.push_back(-Expr(lambdas[mu]) * gammas[mu].c[idx]);
    eqs.push_back(sym::sum(terms));
  }
  const auto solved = sym::solve_linear(eqs, lambdas);
  if (!solved.free_parameters.empty() || !solved.consistency_residuals.empty()) {
    throw InconsistentResolution("the Liouville resolution has no unique solution");
  }
  MultiplierSolution out;
  for (const auto& l : lambdas) out.lambdas.push_back(solved.solution.at(l.name));
  for (const auto& eq : eqs) out.residual.push_back(sym::substitute(eq, solved.solution));
  out.duality_holds = true;
  for (std::size_t nu = 0; nu < gammas.size(); ++nu) {
    for (std::size_t mu = 0; mu < out.lambdas.size(); ++mu) {
      const Expr delta = Expr(nu == mu ? 1 : 0);
      if (!sym::is_zero(geo::apply(gammas[nu], out.lambdas[mu]) - delta)) out.duality_holds = false;
    }
  }
  return out;
}

std::vector<Expr> decompose_k(const LagrangianModel& m, const Expr& H, const std::vector<Expr>& primaries) {
  const MultiplierSolution mult = solve_multipliers(m, H, primaries);
  const EvolutionOperator k = build_k_direct(m);
  VectorField sum = darboux_along(H, k.legendre);
  for (std::size_t mu = 0; mu < primaries.size(); ++mu) {
    sum = sum + mult.lambdas[mu] * darboux_along(primaries[mu], k.legendre);
  }
  const auto comps = k.components();
  std::vector<Expr> out;
  for (std::size_t i = 0; i < comps.size(); ++i) out.push_back(comps[i] - sum.c[i]);
  return out;
}

Projectability projectability_check(const LagrangianModel& m, const Expr& H, const std::vector<Expr>& primaries,
                                    const Expr& f) {
  solve_multipliers(m, H, primaries);
  const EvolutionOperator k = build_k_direct(m);
  const Expr kf = k_derive(k, f);
  Projectability out;
  for (std::size_t mu = 0; mu < primaries.size(); ++mu) {
    const VectorField x_phi = ham::hamiltonian_vf_darboux(primaries[mu], ham::canonical_contact_form(k.legendre.target));
    const Expr obstruction = k.legendre.pull(geo::apply(x_phi, f));
    if (!sym::is_zero(obstruction)) {
      out.projectable = false;
      out.obstructing.push_back(mu);
    }
    const Expr via_gamma = geo::apply(gamma_field(primaries[mu], k.legendre), kf);
    if (!sym::is_zero(via_gamma - obstruction)) out.cross_check = false;
  }
  return out;
}

}  // namespace contactk::evo
