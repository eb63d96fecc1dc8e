#pragma once

#include <string>
#include <vector>

#include "contactk/geometry/forms.hpp"
#include "contactk/symexpr/linear_solve.hpp"

namespace contactk::lag {

using geo::ChartPtr;
using geo::OneForm;
using geo::TwoForm;
using geo::VectorField;
using sym::Expr;
using sym::Symbol;

using Matrix = std::vector<std::vector<Expr>>;

struct LagrangianModel {
  std::string name;
  ChartPtr chart;  // velocity chart
  Expr L;
};

/// Checks that L lives on the velocity chart (no momenta, no free functions,
/// no unknown symbols). Throws ModelError.
LagrangianModel make_model(std::string name, ChartPtr chart, Expr L);

/// E_L = v^i L_{v^i} - L.
Expr energy(const LagrangianModel& m);

/// eta_L = ds - L_{v^i} dq^i.
OneForm contact_one_form(const LagrangianModel& m);

TwoForm exterior_derivative(const OneForm& w);

struct LegendreMap {
  ChartPtr source;  // velocity chart
  ChartPtr target;  // phase chart
  sym::Bindings bindings;  // p_i -> L_{v^i}

  Expr pull(const Expr& phase_function) const { return sym::substitute(phase_function, bindings); }
  OneForm pull(const OneForm& phase_form) const;
};

/// Verifies FL*(eta_Q) = eta_L on construction; throws Error otherwise.
LegendreMap legendre_map(const LagrangianModel& m);

/// W_ij = L_{v^i v^j}.
Matrix hessian(const LagrangianModel& m);

struct Regularity {
  bool regular = true;
  std::size_t rank = 0;
  std::vector<std::vector<Expr>> kernel;  // basis of ker W, one vector per direction
};

/// Generic rank of W by elimination. Throws PivotAmbiguity.
Regularity classify_regularity(const LagrangianModel& m);

/// R_L = d/ds - W^{-1} L_{sv} d/dv, checked against i_R d(eta_L) = 0 and
/// i_R eta_L = 1. Throws SingularModel.
VectorField reeb_field(const LagrangianModel& m);

/// Residuals W f + L_{qv} v + L_{sv} L - L_q - L_s L_v (one per degree of
/// freedom) followed by sdot - L.
std::vector<Expr> herglotz_el_residuals(const LagrangianModel& m, const std::vector<Expr>& accelerations,
                                        const Expr& sdot);

struct LagrangianVectorField {
  VectorField field;
  std::vector<sym::FreeParameter> free_parameters;
  std::vector<Expr> residuals;  // candidate Lagrangian constraints
};

/// Solves i_X d(eta_L) = dE_L + L_s eta_L, i_X eta_L = -E_L together with
/// the second-order condition X(q^i) = v^i.
LagrangianVectorField lagrangian_vector_field(const LagrangianModel& m);

}  // namespace contactk::lag
