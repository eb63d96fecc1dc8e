#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "contactk/cli/reports.hpp"
#include "contactk/cli/session.hpp"
#include "contactk/symexpr/compiled.hpp"

namespace contactk::cli {

/// Any residual monitor above this aborts the run with StepRejected.
inline constexpr double kBlowUpGuard = 1e3;

struct Monitors {
  std::vector<std::vector<double>> momenta;      // FL along the path
  std::vector<double> herglotz_dirac;            // max |residual| per row
  std::vector<double> k_residual;                // |T(FL) xi' - K(xi)|_inf per row
  std::vector<double> dissipation;               // dH/dt + H_s H per row
  std::vector<double> hamiltonian;               // H(FL(xi)) per row
  std::vector<std::vector<double>> constraints;  // Lagrangian chain values per row
};

struct Trajectory {
  std::vector<std::string> state_names;     // velocity-chart coordinates
  std::vector<std::string> momentum_names;
  std::vector<std::string> constraint_names;
  std::vector<std::string> integrated;      // coordinates advanced by RK4
  double h = 0.0;
  double T = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // full (q, v, s) per row
  Monitors monitors;
};

/// Rows = floor(T/h + 1e-9) + 1.
std::size_t row_count(double h, double T);

/// Fixed-step classical RK4 on (q, v, s). Regular models solve W f = -c for
/// the accelerations; singular models integrate the surviving coordinates of
/// the Lagrangian vector field on the final constraint set, with eliminated
/// coordinates recomputed from the constraint relations at every stage.
class Simulator {
 public:
  Simulator(const LoadedModel& lm, int max_iter);
  ~Simulator();

  bool reduced() const;
  const std::vector<std::string>& integrated() const;
  /// Eliminated coordinate -> its value on the constraint set.
  const sym::Bindings& eliminated() const;

  /// Uses the [simulate] block. Throws InputError, SingularWithoutReduction,
  /// StepRejected.
  Trajectory run() const;
  Trajectory run(double h, double T, const std::vector<std::pair<std::string, double>>& initial) const;

  /// Monitors from states on a uniform grid of step h; five-point differences.
  Monitors monitors(const std::vector<std::vector<double>>& states, double h) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string to_csv(const Trajectory& t);

/// Header names and numeric rows of a CSV produced by to_csv.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text);

Json simulate_report(const LoadedModel& lm, const Trajectory& t);

}  // namespace contactk::cli
