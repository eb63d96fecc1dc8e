#pragma once

#include <map>
#include <string>
#include <vector>

#include "contactk/cli/model_file.hpp"
#include "contactk/constraints/constraints.hpp"

namespace contactk::cli {

using sym::Expr;

/// A model file turned into symbolic objects.
struct LoadedModel {
  ModelFile file;
  lag::LagrangianModel model;
  geo::ChartPtr phase;
  lag::Regularity regularity;
  Expr H;
  bool hamiltonian_derived = false;
  std::vector<Expr> primaries;
  bool primaries_derived = false;
  std::map<std::string, double> parameter_values;
};

/// Parses every expression, derives H and the primaries when the file does
/// not supply them, and checks FL*H = E_L. Throws InputError,
/// UserInputRequired or PivotAmbiguity.
LoadedModel load(const ModelFile& file);

/// Hamiltonian constraint algorithm plus its Lagrangian image.
struct ChainAnalysis {
  ham::RestrictedSurface surface;
  Expr H0;
  con::ConstraintChain chain;
  std::vector<con::ConstraintEntry> lagrangian;
};

/// Regular models run on the canonical form with no primaries; singular
/// ones on the primary surface with the Reeb-free solver.
ChainAnalysis analyze_chain(const LoadedModel& lm, int max_iter);

/// Coordinates first, then parameters: the variable order used for
/// numeric evaluation on the velocity chart.
std::vector<std::string> velocity_variables(const LoadedModel& lm);

}  // namespace contactk::cli
