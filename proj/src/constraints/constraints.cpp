#include "contactk/constraints/constraints.hpp"

#include <set>

#include "contactk/error.hpp"
#include "contactk/symexpr/normalize.hpp"
#include "contactk/symexpr/relation_set.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::con {

using sym::Symbol;
using sym::SymbolRole;

namespace {

std::vector<Symbol> elimination_order(const geo::ChartPtr& chart) {
  std::vector<Symbol> out = chart->fibers();
  out.insert(out.end(), chart->positions().begin(), chart->positions().end());
  out.push_back(chart->action());
  return out;
}

sym::SolveOptions options_for(const geo::ChartPtr& chart) {
  sym::SolveOptions opts;
  for (const auto& s : chart->coordinates()) opts.reserved_names.insert(s.name);
  for (const auto& s : chart->parameters()) opts.reserved_names.insert(s.name);
  return opts;
}

}  // namespace

std::string_view to_string(ProvenanceKind k) {
  switch (k) {
    case ProvenanceKind::Primary: return "primary";
    case ProvenanceKind::Consistency: return "consistency";
    case ProvenanceKind::Tangency: return "tangency";
    case ProvenanceKind::ImageOfK: return "image-of-K";
  }
  return "primary";
}

std::string_view to_string(ChainStatus s) { return s == ChainStatus::Terminated ? "Terminated" : "MaxIterations"; }

std::variant<std::vector<Expr>, NeedsUserInput> primary_constraints(const lag::LagrangianModel& m) {
  const auto reg = lag::classify_regularity(m);
  const auto phase = geo::phase_chart_for(*m.chart);
  const auto& ch = *m.chart;
  std::vector<Expr> out;
  for (const auto& dir : reg.kernel) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < ch.n(); ++i) {
      terms.push_back(dir[i] * (phase->fiber(i) - sym::diff(m.L, ch.fibers()[i])));
    }
    const Expr relation = sym::sum(terms);
    for (const auto& v : ch.fibers()) {
      if (!sym::is_zero(sym::diff(relation, v))) {
        return NeedsUserInput{"momentum relation along a Hessian kernel direction depends on velocities; "
                              "list the primary constraints with 'primary = ...' in the model file"};
      }
    }
    out.push_back(relation);
  }
  return out;
}

std::variant<DerivedHamiltonian, NeedsUserInput> derive_hamiltonian(const lag::LagrangianModel& m) {
  const auto phase = geo::phase_chart_for(*m.chart);
  const auto& ch = *m.chart;
  std::vector<Expr> eqs;
  for (std::size_t i = 0; i < ch.n(); ++i) eqs.push_back(phase->fiber(i) - sym::diff(m.L, ch.fibers()[i]));
  sym::LinearSolveResult solved;
  try {
    solved = sym::solve_linear(eqs, ch.fibers(), options_for(m.chart));
  } catch (const AffinityError&) {
    return NeedsUserInput{"momenta are not affine in the velocities; supply 'hamiltonian = ...' in the model file"};
  }
  const Expr h = sym::substitute(lag::energy(m), solved.solution);
  for (const auto& fp : solved.free_parameters) {
    if (sym::depends_on(h, fp.symbol.name)) {
      return NeedsUserInput{"the energy does not descend to phase space; supply 'hamiltonian = ...'"};
    }
  }
  return DerivedHamiltonian{h, solved.consistency_residuals};
}

ham::RestrictedSurface primary_surface(const geo::ChartPtr& phase, const std::vector<Expr>& primaries) {
  sym::RelationSet relations(elimination_order(phase));
  for (const auto& phi : primaries) relations.add(phi);
  return ham::restrict_to(phase, relations.bindings());
}

ConstraintChain run_constraint_algorithm(const Expr& H0, const OneForm& eta0, const std::vector<Expr>& primaries,
                                         int max_iter) {
  const auto& chart = eta0.chart;
  ConstraintChain chain{{}, {}, {}, VectorField(chart), ChainStatus::Terminated};
  std::vector<Expr> consistency;
  if (ham::is_canonical(eta0)) {
    chain.field = ham::hamiltonian_vf_darboux(H0, eta0);
    for (std::size_t mu = 0; mu < primaries.size(); ++mu) {
      const Symbol u("u_" + std::to_string(mu + 1), SymbolRole::FreeFunction, static_cast<int>(mu + 1));
      chain.free_parameters.push_back({u, Symbol("phi_" + std::to_string(mu))});
      chain.field = chain.field + Expr(u) * ham::hamiltonian_vf_darboux(primaries[mu], eta0);
    }
  } else {
    auto solved = ham::hamiltonian_vf_reeb_free(H0, eta0);
    chain.field = std::move(solved.field);
    chain.free_parameters = std::move(solved.free_parameters);
    consistency = std::move(solved.constraints);
  }

  sym::RelationSet relations(elimination_order(chart));
  std::vector<int> generation;
  auto add_entry = [&](const Expr& f, Provenance p, int gen, bool force) {
    const Expr n = sym::normalize(f);
    try {
      if (relations.add(n) == sym::RelationSet::AddResult::Dependent && !force) return;
    } catch (const PivotAmbiguity&) {
      if (!force && relations.vanishes(n)) return;
      throw;
    }
    chain.entries.push_back({f, Side::Hamiltonian, p, n});
    generation.push_back(gen);
  };
  for (const auto& phi : primaries) add_entry(phi, {ProvenanceKind::Primary, std::nullopt}, 0, true);
  for (const auto& c : consistency) add_entry(c, {ProvenanceKind::Consistency, std::nullopt}, 1, false);

  auto undetermined = [&]() {
    std::vector<Symbol> out;
    for (const auto& fp : chain.free_parameters) {
      if (!chain.determined_multipliers.contains(fp.symbol.name)) out.push_back(fp.symbol);
    }
    return out;
  };

  for (std::size_t i = 0; i < chain.entries.size(); ++i) {
    const Expr t = geo::apply(chain.field, chain.entries[i].function);
    const Expr reduced = relations.reduce(t);
    if (sym::is_zero(reduced)) continue;

    bool depends_on_free = false;
    bool determined = false;
    for (const auto& f : undetermined()) {
      if (!sym::depends_on(reduced, f.name)) continue;
      depends_on_free = true;
      const Expr coefficient = sym::diff(reduced, f);
      if (!sym::is_nonzero(coefficient)) continue;
      const Expr value = -(reduced - coefficient * Expr(f)) / coefficient;
      const sym::Bindings step{{f.name, value}};
      for (auto& [name, v] : chain.determined_multipliers) v = sym::substitute(v, step);
      chain.determined_multipliers.emplace(f.name, value);
      chain.field = geo::substitute(chain.field, step);
      determined = true;
      break;
    }
    if (determined) continue;
    if (depends_on_free) {
      throw PivotAmbiguity("tangency condition involves free functions with undecidable coefficients: " +
                           sym::to_string(reduced));
    }
    if (generation[i] + 1 > max_iter) {
      chain.status = ChainStatus::MaxIterations;
      break;
    }
    add_entry(t, {ProvenanceKind::Tangency, i}, generation[i] + 1, false);
  }
  return chain;
}

std::vector<ConstraintEntry> lagrangian_chain_via_k(const evo::EvolutionOperator& k, const ConstraintChain& chain) {
  sym::RelationSet relations(elimination_order(k.model.chart));
  std::vector<ConstraintEntry> out;
  for (std::size_t i = 0; i < chain.entries.size(); ++i) {
    if (chain.entries[i].side != Side::Hamiltonian) continue;
    const Expr chi = evo::k_derive(k, chain.entries[i].function);
    const Expr n = sym::normalize(chi);
    try {
      if (relations.add(n) == sym::RelationSet::AddResult::Dependent) continue;
    } catch (const PivotAmbiguity&) {
      if (relations.vanishes(n)) continue;
      throw;
    }
    out.push_back({chi, Side::Lagrangian, {ProvenanceKind::ImageOfK, i}, n});
  }
  return out;
}

PhaseJet phase_jet(const lag::LagrangianModel& m) {
  PhaseJet jet;
  const auto phase = geo::phase_chart_for(*m.chart);
  jet.momenta = phase->fibers();
  for (const auto& q : m.chart->positions()) jet.momentum_rates.emplace_back("pdot_" + q.name, SymbolRole::Auxiliary);
  jet.action_rate = Symbol("sdot", SymbolRole::Auxiliary);
  return jet;
}

std::vector<Expr> herglotz_dirac_residuals(const lag::LagrangianModel& m, const PhaseJet& jet) {
  const auto& ch = *m.chart;
  const Expr L_s = sym::diff(m.L, ch.action());
  std::vector<Expr> out;
  for (std::size_t i = 0; i < ch.n(); ++i) out.push_back(Expr(jet.momenta[i]) - sym::diff(m.L, ch.fibers()[i]));
  for (std::size_t i = 0; i < ch.n(); ++i) {
    out.push_back(Expr(jet.momentum_rates[i]) - L_s * sym::diff(m.L, ch.fibers()[i]) -
                  sym::diff(m.L, ch.positions()[i]));
  }
  out.push_back(Expr(jet.action_rate) - m.L);
  return out;
}

}  // namespace contactk::con
