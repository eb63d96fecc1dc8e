#include "contactk/cli/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "contactk/error.hpp"
#include "contactk/evolution/evolution.hpp"
#include "contactk/symexpr/relation_set.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::cli {

namespace {

std::vector<sym::Symbol> elimination_order(const geo::ChartPtr& chart) {
  std::vector<sym::Symbol> out = chart->fibers();
  out.insert(out.end(), chart->positions().begin(), chart->positions().end());
  out.push_back(chart->action());
  return out;
}

/// Five-point derivative of column j at row i on a uniform grid.
double derivative(const std::vector<double>& f, std::size_t i, double h) {
  const std::size_t n = f.size();
  if (i >= 2 && i + 2 < n) return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
  if (i == 0) return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
  if (i == 1) return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
  if (i == n - 1) {
    return (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
  }
  return (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t row_count(double h, double T) { return static_cast<std::size_t>(std::floor(T / h + 1e-9)) + 1; }

struct Simulator::Impl {
  const LoadedModel* lm = nullptr;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> params;
  std::vector<std::string> coordinate_names;
  std::vector<std::string> momentum_names;
  std::vector<std::string> constraint_names;

  bool reduced = false;
  std::vector<std::size_t> integrated;  // indices into the chart coordinates
  std::vector<std::string> integrated_names;
  std::vector<std::size_t> eliminated_index;
  sym::Bindings eliminated;
  std::unique_ptr<sym::CompiledSystem> eliminated_sys;  // values of eliminated coordinates
  std::unique_ptr<sym::CompiledSystem> rhs_sys;         // regular: W then c; reduced: components
  std::unique_ptr<sym::CompiledSystem> monitor_sys;     // p, b, c(K), H, H_s, chi...
  std::unique_ptr<sym::CompiledSystem> dirac_sys;       // Herglotz-Dirac residuals
  std::size_t chain_size = 0;

  std::vector<double> values(const std::vector<double>& state) const {
    std::vector<double> v(state);
    v.insert(v.end(), params.begin(), params.end());
    return v;
  }

  /// Full state from the integrated coordinates.
  std::vector<double> expand(const std::vector<double>& y) const {
    std::vector<double> state(dim, 0.0);
    for (std::size_t k = 0; k < integrated.size(); ++k) state[integrated[k]] = y[k];
    if (eliminated_sys) {
      const auto e = eliminated_sys->evaluate(values(state));
      for (std::size_t k = 0; k < eliminated_index.size(); ++k) state[eliminated_index[k]] = e[k];
    }
    return state;
  }

  std::vector<double> rhs(const std::vector<double>& y) const {
    const std::vector<double> state = expand(y);
    const auto out = rhs_sys->evaluate(values(state));
    if (reduced) return out;
    Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd c(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = out[i * n + j];
      c(static_cast<Eigen::Index>(i)) = out[n * n + i];
    }
    const Eigen::VectorXd f = w.partialPivLu().solve(-c);
    std::vector<double> dy(dim);
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = state[n + i];
      dy[n + i] = f(static_cast<Eigen::Index>(i));
    }
    dy[2 * n] = out[n * n + n];
    return dy;
  }
};

Simulator::Simulator(const LoadedModel& lm, int max_iter) : impl_(std::make_unique<Impl>()) {
  auto& s = *impl_;
  s.lm = &lm;
  const auto& m = lm.model;
  const auto& chart = m.chart;
  s.n = chart->n();
  s.dim = chart->dimension();
  for (const auto& p : chart->parameters()) s.params.push_back(lm.parameter_values.at(p.name));
  for (const auto& c : chart->coordinates()) s.coordinate_names.push_back(c.name);
  const auto vars = velocity_variables(lm);

  const auto analysis = analyze_chain(lm, max_iter);
  std::vector<Expr> chis;
  for (std::size_t k = 0; k < analysis.lagrangian.size(); ++k) {
    chis.push_back(analysis.lagrangian[k].function);
    s.constraint_names.push_back("chi_" + std::to_string(k + 1));
  }
  s.chain_size = chis.size();

  if (lm.regularity.regular) {
    std::vector<Expr> out;
    for (const auto& row : lag::hessian(m)) out.insert(out.end(), row.begin(), row.end());
    const std::vector<Expr> zeros(s.n, Expr(0));
    const auto res = lag::herglotz_el_residuals(m, zeros, Expr(0));
    out.insert(out.end(), res.begin(), res.begin() + static_cast<std::ptrdiff_t>(s.n));
    out.push_back(m.L);
    s.rhs_sys = std::make_unique<sym::CompiledSystem>(out, vars);
    for (std::size_t a = 0; a < s.dim; ++a) {
      s.integrated.push_back(a);
      s.integrated_names.push_back(s.coordinate_names[a]);
    }
  } else {
    s.reduced = true;
    auto xl = lag::lagrangian_vector_field(m);
    sym::RelationSet rel(elimination_order(chart));
    for (const auto& chi : chis) rel.add(chi);
    for (const auto& r : xl.residuals) rel.add(r);

    std::set<std::string> undetermined;
    for (const auto& fp : xl.free_parameters) undetermined.insert(fp.symbol.name);
    for (const auto& fp : xl.free_parameters) {
      for (const auto& chi : chis) {
        const Expr t = rel.reduce(geo::apply(xl.field, chi));
        if (!sym::depends_on(t, fp.symbol.name)) continue;
        const Expr coefficient = sym::diff(t, fp.symbol);
        if (!sym::is_nonzero(coefficient)) continue;
        const Expr value = -(t - coefficient * Expr(fp.symbol)) / coefficient;
        xl.field = geo::substitute(xl.field, {{fp.symbol.name, value}});
        undetermined.erase(fp.symbol.name);
        break;
      }
    }

    s.eliminated = rel.bindings();
    std::vector<Expr> elim_exprs;
    std::vector<Expr> components;
    for (std::size_t a = 0; a < s.dim; ++a) {
      const auto& name = s.coordinate_names[a];
      if (const auto it = s.eliminated.find(name); it != s.eliminated.end()) {
        s.eliminated_index.push_back(a);
        elim_exprs.push_back(it->second);
        continue;
      }
      const Expr c = rel.reduce(xl.field.c[a]);
      for (const auto& f : undetermined) {
        if (sym::depends_on(c, f)) {
          throw SingularWithoutReduction("the " + name + " component of the Lagrangian vector field keeps the free function " +
                                         f + " on the final constraint set");
        }
      }
      s.integrated.push_back(a);
      s.integrated_names.push_back(name);
      components.push_back(c);
    }
    s.eliminated_sys = std::make_unique<sym::CompiledSystem>(elim_exprs, vars);
    s.rhs_sys = std::make_unique<sym::CompiledSystem>(components, vars);
  }

  // Monitors.
  const auto k = evo::build_k_direct(m);
  std::vector<Expr> mon;
  for (const auto& p : k.legendre.target->fibers()) {
    s.momentum_names.push_back(p.name);
    mon.push_back(k.legendre.bindings.at(p.name));
  }
  mon.insert(mon.end(), k.b.begin(), k.b.end());
  mon.push_back(k.c);
  mon.push_back(k.legendre.pull(lm.H));
  mon.push_back(k.legendre.pull(sym::diff(lm.H, lm.phase->action())));
  mon.insert(mon.end(), chis.begin(), chis.end());
  s.monitor_sys = std::make_unique<sym::CompiledSystem>(mon, vars);

  const auto jet = con::phase_jet(m);
  std::vector<std::string> dvars = vars;
  for (const auto& p : jet.momenta) dvars.push_back(p.name);
  for (const auto& p : jet.momentum_rates) dvars.push_back(p.name);
  dvars.push_back(jet.action_rate.name);
  s.dirac_sys = std::make_unique<sym::CompiledSystem>(con::herglotz_dirac_residuals(m, jet), dvars);
}

Simulator::~Simulator() = default;

bool Simulator::reduced() const { return impl_->reduced; }
const std::vector<std::string>& Simulator::integrated() const { return impl_->integrated_names; }
const sym::Bindings& Simulator::eliminated() const { return impl_->eliminated; }

Trajectory Simulator::run() const {
  const auto& file = impl_->lm->file;
  if (!file.simulate) throw InputError(file.source + ": no [simulate] section");
  return run(file.simulate->h, file.simulate->T, file.simulate->initial);
}

Trajectory Simulator::run(double h, double T, const std::vector<std::pair<std::string, double>>& initial) const {
  const auto& s = *impl_;
  const auto& source = s.lm->file.source;
  std::map<std::string, double> given;
  for (const auto& [name, value] : initial) {
    if (std::find(s.coordinate_names.begin(), s.coordinate_names.end(), name) == s.coordinate_names.end()) {
      throw InputError(source + ": [simulate] sets '" + name + "', which is not a coordinate of the velocity chart");
    }
    given[name] = value;
  }
  const std::string action = s.coordinate_names.back();
  std::vector<double> y;
  for (const auto& name : s.integrated_names) {
    auto it = given.find(name);
    if (it == given.end()) {
      if (name != action) throw InputError(source + ": [simulate] needs an initial value for '" + name + "'");
      y.push_back(0.0);
    } else {
      y.push_back(it->second);
    }
  }
  std::vector<double> state = s.expand(y);
  for (std::size_t k = 0; k < s.eliminated_index.size(); ++k) {
    const std::size_t a = s.eliminated_index[k];
    const auto it = given.find(s.coordinate_names[a]);
    if (it == given.end()) continue;
    if (std::fabs(it->second - state[a]) > 1e-9 * std::max(1.0, std::fabs(state[a]))) {
      throw InputError(source + ": initial value of '" + s.coordinate_names[a] +
                       "' is off the final constraint set (expected " + format_double(state[a]) + ")");
    }
  }

  const std::size_t rows = row_count(h, T);
  if (rows < 5) throw InputError(source + ": need at least 5 rows (T/h >= 4) for the derivative monitors");
  Trajectory t;
  t.state_names = s.coordinate_names;
  t.momentum_names = s.momentum_names;
  t.constraint_names = s.constraint_names;
  t.integrated = s.integrated_names;
  t.h = h;
  t.T = T;
  t.times.reserve(rows);
  t.states.reserve(rows);
  t.times.push_back(0.0);
  t.states.push_back(state);

  const std::size_t m = y.size();
  std::vector<double> tmp(m);
  for (std::size_t i = 1; i < rows; ++i) {
    const auto k1 = s.rhs(y);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    const auto k2 = s.rhs(tmp);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    const auto k3 = s.rhs(tmp);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + h * k3[j];
    const auto k4 = s.rhs(tmp);
    for (std::size_t j = 0; j < m; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    state = s.expand(y);
    for (double v : state) {
      if (!std::isfinite(v)) throw StepRejected("non-finite state at t = " + format_double(static_cast<double>(i) * h));
    }
    t.times.push_back(static_cast<double>(i) * h);
    t.states.push_back(state);
  }

  t.monitors = monitors(t.states, h);
  const auto& mon = t.monitors;
  for (std::size_t i = 0; i < rows; ++i) {
    double worst = std::max({mon.herglotz_dirac[i], mon.k_residual[i], std::fabs(mon.dissipation[i])});
    for (double c : mon.constraints[i]) worst = std::max(worst, std::fabs(c));
    if (!(worst <= kBlowUpGuard)) {
      throw StepRejected("monitor exceeded " + format_double(kBlowUpGuard) + " at t = " + format_double(t.times[i]));
    }
  }
  return t;
}

Monitors Simulator::monitors(const std::vector<std::vector<double>>& states, double h) const {
  const auto& s = *impl_;
  const std::size_t rows = states.size();
  if (rows < 5) throw InputError("need at least 5 rows for the derivative monitors");
  const std::size_t n = s.n;

  std::vector<std::vector<double>> mon(rows);
  for (std::size_t i = 0; i < rows; ++i) mon[i] = s.monitor_sys->evaluate(s.values(states[i]));

  // Columns to differentiate: q (n), p (n), s, H.
  std::vector<std::vector<double>> col(2 * n + 2, std::vector<double>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      col[a][i] = states[i][a];
      col[n + a][i] = mon[i][a];
    }
    col[2 * n][i] = states[i][2 * n];
    col[2 * n + 1][i] = mon[i][2 * n + 1];
  }

  Monitors out;
  out.momenta.resize(rows);
  out.herglotz_dirac.resize(rows);
  out.k_residual.resize(rows);
  out.dissipation.resize(rows);
  out.hamiltonian.resize(rows);
  out.constraints.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& m = mon[i];
    const auto& x = states[i];
    std::vector<double> qdot(n), pdot(n);
    for (std::size_t a = 0; a < n; ++a) {
      qdot[a] = derivative(col[a], i, h);
      pdot[a] = derivative(col[n + a], i, h);
    }
    const double sdot = derivative(col[2 * n], i, h);
    const double hdot = derivative(col[2 * n + 1], i, h);

    double kres = std::fabs(sdot - m[2 * n]);
    for (std::size_t a = 0; a < n; ++a) {
      kres = std::max(kres, std::fabs(qdot[a] - x[n + a]));
      kres = std::max(kres, std::fabs(pdot[a] - m[n + a]));
    }
    out.k_residual[i] = kres;

    std::vector<double> dv = s.values(x);
    for (std::size_t a = 0; a < n; ++a) dv.push_back(m[a]);
    dv.insert(dv.end(), pdot.begin(), pdot.end());
    dv.push_back(sdot);
    double hd = 0.0;
    for (double r : s.dirac_sys->evaluate(dv)) hd = std::max(hd, std::fabs(r));
    out.herglotz_dirac[i] = hd;

    out.momenta[i].assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n));
    out.hamiltonian[i] = m[2 * n + 1];
    out.dissipation[i] = hdot + m[2 * n + 2] * m[2 * n + 1];
    out.constraints[i].assign(m.begin() + static_cast<std::ptrdiff_t>(2 * n + 3), m.end());
  }
  return out;
}

std::string to_csv(const Trajectory& t) {
  std::ostringstream os;
  os << 't';
  for (const auto& n : t.state_names) os << ',' << n;
  for (const auto& n : t.momentum_names) os << ',' << n;
  os << ",herglotz_dirac,k_residual,dissipation,H";
  for (const auto& n : t.constraint_names) os << ',' << n;
  os << '\n';
  const auto& m = t.monitors;
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    os << format_double(t.times[i]);
    for (double v : t.states[i]) os << ',' << format_double(v);
    for (double v : m.momenta[i]) os << ',' << format_double(v);
    os << ',' << format_double(m.herglotz_dirac[i]) << ',' << format_double(m.k_residual[i]) << ','
       << format_double(m.dissipation[i]) << ',' << format_double(m.hamiltonian[i]);
    for (double v : m.constraints[i]) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      out.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != out.header.size()) throw InputError("CSV row width differs from the header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    out.rows.push_back(std::move(row));
  }
  return out;
}

Json simulate_report(const LoadedModel& lm, const Trajectory& t) {
  const auto& m = t.monitors;
  const auto max_abs = [](const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::fabs(x));
    return r;
  };
  Json j;
  j["command"] = "simulate";
  j["model"] = lm.model.name;
  j["seed"] = sym::default_seed();
  j["integrator"] = "RK4";
  j["h"] = t.h;
  j["T"] = t.T;
  j["rows"] = t.times.size();
  j["integrated"] = t.integrated;
  Json final_state;
  for (std::size_t a = 0; a < t.state_names.size(); ++a) final_state[t.state_names[a]] = t.states.back()[a];
  j["final_state"] = final_state;
  Json mon;
  mon["herglotz_dirac_max"] = max_abs(m.herglotz_dirac);
  mon["k_residual_max"] = max_abs(m.k_residual);
  mon["dissipation_max"] = max_abs(m.dissipation);
  mon["H_initial"] = m.hamiltonian.front();
  mon["H_final"] = m.hamiltonian.back();
  Json cons = Json::object();
  for (std::size_t k = 0; k < t.constraint_names.size(); ++k) {
    double worst = 0.0;
    for (const auto& row : m.constraints) worst = std::max(worst, std::fabs(row[k]));
    cons[t.constraint_names[k]] = worst;
  }
  mon["constraint_max"] = cons;
  j["monitors"] = mon;
  return j;
}

}  // namespace contactk::cli
