#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "contactk/evolution/evolution.hpp"
#include "contactk/hamiltonian/hamiltonian.hpp"
#include "contactk/lagrangian/lagrangian.hpp"

namespace contactk::con {

using geo::OneForm;
using geo::VectorField;
using sym::Expr;

enum class Side { Hamiltonian, Lagrangian };

enum class ProvenanceKind {
  Primary,
  Consistency,  // residual of the Reeb-free solve
  Tangency,
  ImageOfK,
};

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::Primary;
  std::optional<std::size_t> parent;
};

struct ConstraintEntry {
  Expr function;
  Side side = Side::Hamiltonian;
  Provenance provenance;
  Expr normalized;
};

enum class ChainStatus { Terminated, MaxIterations };

struct ConstraintChain {
  std::vector<ConstraintEntry> entries;
  sym::Bindings determined_multipliers;  // free-function name -> value
  std::vector<sym::FreeParameter> free_parameters;
  VectorField field;  // with the determined multipliers substituted
  ChainStatus status = ChainStatus::Terminated;
};

std::string_view to_string(ProvenanceKind k);
std::string_view to_string(ChainStatus s);

struct NeedsUserInput {
  std::string reason;
};

/// Velocity-free momentum relations along the Hessian kernel.
std::variant<std::vector<Expr>, NeedsUserInput> primary_constraints(const lag::LagrangianModel& m);

struct DerivedHamiltonian {
  Expr H;
  std::vector<Expr> relations;  // momentum relations left over by the inversion
};

/// Inverts p = L_v for the velocities and substitutes into E_L.
std::variant<DerivedHamiltonian, NeedsUserInput> derive_hamiltonian(const lag::LagrangianModel& m);

/// Writes the primaries as a graph over the phase chart (momenta preferred).
ham::RestrictedSurface primary_surface(const geo::ChartPtr& phase, const std::vector<Expr>& primaries);

/// Tangency iteration. With a canonical eta0 and primaries the field is
/// X_H + sum u_mu X_phi_mu; otherwise the Reeb-free solver supplies X and
/// its residuals. Throws PivotAmbiguity.
ConstraintChain run_constraint_algorithm(const Expr& H0, const OneForm& eta0, const std::vector<Expr>& primaries,
                                         int max_iter = 12);

/// chi_k = K.phi_k for each Hamiltonian entry, normalized and filtered for
/// independence.
std::vector<ConstraintEntry> lagrangian_chain_via_k(const evo::EvolutionOperator& k, const ConstraintChain& chain);

/// Jet symbols for a phase path: p_<q>, pdot_<q>, sdot.
struct PhaseJet {
  std::vector<sym::Symbol> momenta;
  std::vector<sym::Symbol> momentum_rates;
  sym::Symbol action_rate;
};

PhaseJet phase_jet(const lag::LagrangianModel& m);

/// p - L_v, pdot - L_s L_v - L_q, sdot - L.
std::vector<Expr> herglotz_dirac_residuals(const lag::LagrangianModel& m, const PhaseJet& jet);

}  // namespace contactk::con
