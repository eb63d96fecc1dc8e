#pragma once

#include <vector>

#include "contactk/geometry/forms.hpp"
#include "contactk/symexpr/linear_solve.hpp"

namespace contactk::ham {

using geo::ChartPtr;
using geo::OneForm;
using geo::TwoForm;
using geo::VectorField;
using sym::Expr;
using sym::Symbol;

struct HamiltonianModel {
  ChartPtr chart;  // phase chart
  Expr H;
  OneForm eta;
};

/// eta defaults to the canonical form. Throws ModelError if H contains
/// velocities, free functions or symbols outside the chart.
HamiltonianModel make_model(ChartPtr chart, Expr H);

/// ds - sum p_i dq^i.
OneForm canonical_contact_form(const ChartPtr& phase);
OneForm canonical_contact_form(std::size_t n);

bool is_canonical(const OneForm& eta);

/// X_H = H_p d/dq - (H_q + p H_s) d/dp + (p H_p - H) d/ds.
/// Throws NonCanonicalForm unless eta is canonical.
VectorField hamiltonian_vf_darboux(const Expr& H, const OneForm& eta);

/// P0 given as a graph: some ambient coordinates are eliminated in favour
/// of expressions in the others.
struct RestrictedSurface {
  ChartPtr ambient;
  sym::Bindings eliminated;
  std::vector<Symbol> surviving;
  OneForm eta0;  // j*(eta_Q), written on the ambient chart
};

RestrictedSurface restrict_to(const ChartPtr& phase, const sym::Bindings& eliminated);

struct ReebFreeSolution {
  VectorField field;
  std::vector<sym::FreeParameter> free_parameters;
  std::vector<Expr> constraints;  // normalized, pairwise independent
};

/// Solves (i_X d eta0) ^ eta0 = dH0 ^ eta0 and i_X eta0 = -H0 in the
/// components of X. Throws PivotAmbiguity.
ReebFreeSolution hamiltonian_vf_reeb_free(const Expr& H0, const OneForm& eta0);

enum class ReebKind { Unique, Family, None };

struct ReebExistence {
  ReebKind kind = ReebKind::None;
  VectorField field;  // with free functions for Family
  std::vector<sym::FreeParameter> free_parameters;
  std::vector<Expr> inconsistencies;
};

/// Solves i_R d eta0 = 0, i_R eta0 = 1.
ReebExistence reeb_existence(const OneForm& eta0);

/// Checks eta ^ (d eta)^n != 0 at a random point. Throws DegenerateContactForm.
void require_contact(const OneForm& eta);

/// B(X) = i_X d eta + (i_X eta) eta.
OneForm bundle_iso_B(const OneForm& eta, const VectorField& x);
VectorField bundle_iso_B_inverse(const OneForm& eta, const OneForm& alpha);

/// i_{X_H} dH + H_s H, identically zero for every H on a Darboux chart.
Expr dissipation_residual(const Expr& H, const OneForm& eta);

/// Omega = -H d eta + dH ^ eta.
TwoForm omega_form(const Expr& H, const OneForm& eta);

}  // namespace contactk::ham
