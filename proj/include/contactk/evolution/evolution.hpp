#pragma once

#include <vector>

#include "contactk/hamiltonian/hamiltonian.hpp"
#include "contactk/lagrangian/lagrangian.hpp"

namespace contactk::evo {

using geo::VectorField;
using lag::LagrangianModel;
using lag::LegendreMap;
using sym::Expr;

/// K = a^i d/dq^i + b_i d/dp_i + c d/ds along FL, with every component
/// written on the velocity chart.
struct EvolutionOperator {
  LagrangianModel model;
  LegendreMap legendre;
  std::vector<Expr> a;
  std::vector<Expr> b;
  Expr c;

  /// Components in phase-chart coordinate order (q, p, s).
  std::vector<Expr> components() const;
};

EvolutionOperator build_k_direct(const LagrangianModel& m);

/// Solves FL*(B o K) = dE_L + (L_s - E_L) eta_L for (b, c) with a = v.
/// Throws PivotAmbiguity, or InconsistentResolution if the system has no
/// unique solution.
EvolutionOperator build_k_via_B(const LagrangianModel& m);

/// Reads the coefficients of dL + L ds - L_s eta_L and permutes them.
EvolutionOperator build_k_tulczyjew(const LagrangianModel& m);

/// Componentwise zero test of the difference.
bool same_operator(const EvolutionOperator& x, const EvolutionOperator& y);

/// K.f = v FL*(f_q) + b FL*(f_p) + L FL*(f_s).
Expr k_derive(const EvolutionOperator& k, const Expr& f);

/// Gamma_g = FL*(dg/dp_i) d/dv^i on the velocity chart.
VectorField gamma_field(const Expr& g, const LegendreMap& fl);

struct MultiplierSolution {
  std::vector<Expr> lambdas;   // one per primary constraint
  std::vector<Expr> residual;  // components that must vanish
  bool duality_holds = false;  // Gamma_nu . lambda^mu = delta
};

/// Resolves v = gamma_H + sum lambda^mu gamma_mu. Throws
/// HamiltonianMismatch if FL*H != E_L, InconsistentResolution if the
/// system cannot be solved exactly.
MultiplierSolution solve_multipliers(const LagrangianModel& m, const Expr& H, const std::vector<Expr>& primaries);

/// K - (X_H o FL + sum lambda^mu X_phi_mu o FL), componentwise, with the
/// Hamiltonian fields taken from the Darboux formula on the full phase chart.
std::vector<Expr> decompose_k(const LagrangianModel& m, const Expr& H, const std::vector<Expr>& primaries);

struct Projectability {
  bool projectable = true;
  std::vector<std::size_t> obstructing;  // indices into the primaries
  bool cross_check = true;               // Gamma_mu(K.f) = FL*(X_phi_mu . f)
};

Projectability projectability_check(const LagrangianModel& m, const Expr& H, const std::vector<Expr>& primaries,
                                    const Expr& f);

}  // namespace contactk::evo
