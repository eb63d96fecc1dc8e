#include "contactk/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "contactk/cli/simulate.hpp"
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

sym::RelationSet relations(const geo::ChartPtr& chart, const std::vector<con::ConstraintEntry>& entries) {
  sym::RelationSet rel(elimination_order(chart));
  for (const auto& e : entries) rel.add(e.function);
  return rel;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::fabs(x));
  return r;
}

class Suite {
 public:
  /// A check that throws is recorded as failed; PivotAmbiguity and
  /// UserInputRequired propagate.
  void run(const std::string& name, const std::function<bool(std::string&)>& check) {
    CheckResult r{name, false, {}};
    try {
      r.passed = check(r.detail);
    } catch (const PivotAmbiguity&) {
      throw;
    } catch (const UserInputRequired&) {
      throw;
    } catch (const Error& e) {
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }

  std::vector<CheckResult> results;
};

geo::VectorField random_field(const geo::ChartPtr& chart, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> coef(-3, 3);
  std::uniform_int_distribution<std::size_t> pick(0, chart->dimension() - 1);
  std::vector<Expr> c;
  for (std::size_t a = 0; a < chart->dimension(); ++a) {
    c.push_back(sym::rational(coef(rng)) + sym::rational(coef(rng)) * Expr(chart->coordinate(pick(rng))));
  }
  return geo::VectorField(chart, std::move(c));
}

}  // namespace

std::vector<CheckResult> verify(const LoadedModel& lm, const VerifyOptions& options) {
  const auto& m = lm.model;
  const auto& chart = m.chart;
  const auto& phase = lm.phase;
  const bool regular = lm.regularity.regular;
  const Expr e_l = lag::energy(m);
  const auto eta_l = lag::contact_one_form(m);
  const auto eta_q = ham::canonical_contact_form(phase);
  const Expr l_s = sym::diff(m.L, chart->action());
  Suite suite;

  // Lagrangian geometry.
  suite.run("lagrangian.pullback_identity", [&](std::string&) {
    const auto fl = lag::legendre_map(m);
    return geo::is_zero(fl.pull(eta_q) - eta_l);
  });
  suite.run("lagrangian.d_squared", [&](std::string&) {
    return geo::is_zero(lag::exterior_derivative(geo::d(e_l, chart))) &&
           geo::is_zero(lag::exterior_derivative(geo::d(m.L, chart)));
  });
  suite.run("lagrangian.hessian_symmetry", [&](std::string&) {
    const auto w = lag::hessian(m);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (!sym::is_zero(w[i][j] - w[j][i])) return false;
      }
    }
    return true;
  });
  if (regular) {
    suite.run("lagrangian.reeb_residuals", [&](std::string&) {
      const auto r = lag::reeb_field(m);
      return geo::is_zero(geo::interior(r, lag::exterior_derivative(eta_l))) &&
             sym::is_zero(geo::interior(r, eta_l) - Expr(1));
    });
    suite.run("lagrangian.second_order_field", [&](std::string& detail) {
      const auto xl = lag::lagrangian_vector_field(m);
      if (!xl.free_parameters.empty()) {
        detail = "free functions remain";
        return false;
      }
      for (std::size_t i = 0; i < chart->n(); ++i) {
        if (!sym::is_zero(xl.field.c[chart->position_index(i)] - chart->fiber(i))) return false;
      }
      return true;
    });
    suite.run("lagrangian.energy_dissipation", [&](std::string&) {
      const auto x = lag::lagrangian_vector_field(m).field;
      const auto r = lag::reeb_field(m);
      return sym::is_zero(geo::apply(x, e_l) + geo::apply(r, e_l) * e_l);
    });
  }

  // Hamiltonian side.
  suite.run("hamiltonian.reeb_free_matches_darboux", [&](std::string&) {
    const auto a = ham::hamiltonian_vf_reeb_free(lm.H, eta_q);
    const auto b = ham::hamiltonian_vf_darboux(lm.H, eta_q);
    return a.free_parameters.empty() && geo::is_zero(a.field - b);
  });
  suite.run("hamiltonian.dissipation_law", [&](std::string&) {
    return sym::is_zero(ham::dissipation_residual(lm.H, eta_q));
  });
  suite.run("hamiltonian.canonical_reeb", [&](std::string&) {
    const auto r = ham::reeb_existence(eta_q);
    if (r.kind != ham::ReebKind::Unique) return false;
    for (std::size_t a = 0; a < phase->dimension(); ++a) {
      const Expr expected = a == phase->action_index() ? Expr(1) : Expr(0);
      if (!sym::is_zero(r.field.c[a] - expected)) return false;
    }
    return true;
  });
  suite.run("hamiltonian.B_linearity", [&](std::string&) {
    std::mt19937_64 rng(sym::default_seed());
    for (int trial = 0; trial < 3; ++trial) {
      const auto x = random_field(phase, rng);
      const auto y = random_field(phase, rng);
      const Expr a = sym::rational(static_cast<long>(rng() % 7) + 1, 2);
      const auto lhs = ham::bundle_iso_B(eta_q, a * x + y);
      if (!geo::is_zero(lhs - a * ham::bundle_iso_B(eta_q, x) - ham::bundle_iso_B(eta_q, y))) return false;
    }
    return true;
  });

  const auto analysis = analyze_chain(lm, options.max_iter);
  const auto& chain = analysis.chain;
  suite.run("hamiltonian.contact_identity", [&](std::string&) {
    const auto sol = ham::hamiltonian_vf_reeb_free(analysis.H0, analysis.surface.eta0);
    return sym::is_zero(geo::interior(sol.field, analysis.surface.eta0) + analysis.H0);
  });

  // Evolution operator.
  auto k = evo::build_k_direct(m);
  if (options.perturb_k && !k.b.empty()) k.b[0] = k.b[0] + Expr(1);
  const geo::VectorField kf(phase, k.components());

  suite.run("evolution.triple_agreement", [&](std::string&) {
    return evo::same_operator(k, evo::build_k_via_B(m)) && evo::same_operator(k, evo::build_k_tulczyjew(m));
  });
  suite.run("evolution.second_order_condition", [&](std::string&) {
    for (std::size_t i = 0; i < chart->n(); ++i) {
      if (!sym::is_zero(k.a[i] - chart->fiber(i))) return false;
    }
    return true;
  });
  suite.run("evolution.structural_condition", [&](std::string&) {
    return sym::is_zero(sym::substitute(geo::interior(kf, eta_q), k.legendre.bindings) + e_l);
  });
  suite.run("evolution.dynamical_condition", [&](std::string&) {
    const auto pulled = geo::pullback(geo::interior(kf, geo::d(eta_q)), k.legendre.bindings, chart);
    return geo::is_zero(pulled - (geo::d(e_l, chart) + l_s * eta_l));
  });
  if (!lm.primaries.empty()) {
    suite.run("evolution.multiplier_duality", [&](std::string&) {
      return evo::solve_multipliers(m, lm.H, lm.primaries).duality_holds;
    });
    suite.run("evolution.decomposition", [&](std::string&) {
      for (const auto& r : evo::decompose_k(m, lm.H, lm.primaries)) {
        if (!sym::is_zero(r)) return false;
      }
      return true;
    });
  }
  suite.run("evolution.projectability_cross_check", [&](std::string& detail) {
    std::vector<Expr> probes;
    for (const auto& e : chain.entries) probes.push_back(e.function);
    for (std::size_t a = 0; a < phase->dimension(); ++a) probes.push_back(Expr(phase->coordinate(a)));
    for (const auto& f : probes) {
      if (!evo::projectability_check(m, lm.H, lm.primaries, f).cross_check) {
        detail = "fails for " + sym::to_string(f);
        return false;
      }
    }
    return true;
  });

  // Constraint algorithm.
  suite.run("constraints.terminated", [&](std::string& detail) {
    detail = std::string(con::to_string(chain.status));
    return chain.status == con::ChainStatus::Terminated;
  });
  const auto lag_rel = relations(chart, analysis.lagrangian);
  suite.run("constraints.chain_soundness", [&](std::string&) {
    for (const auto& e : chain.entries) {
      if (!lag_rel.vanishes(k.legendre.pull(e.function))) return false;
    }
    return true;
  });
  suite.run("constraints.transport", [&](std::string&) {
    for (const auto& e : chain.entries) {
      if (!lag_rel.vanishes(evo::k_derive(k, e.function))) return false;
    }
    return true;
  });
  suite.run("constraints.rerun_adds_nothing", [&](std::string&) {
    std::vector<Expr> known;
    for (const auto& e : chain.entries) known.push_back(e.function);
    const auto again = con::run_constraint_algorithm(analysis.H0, analysis.surface.eta0, known, options.max_iter);
    return again.entries.size() == chain.entries.size() && again.status == con::ChainStatus::Terminated;
  });
  suite.run("constraints.closed_dynamics", [&](std::string&) {
    const auto rel = relations(chain.field.chart, chain.entries);
    for (const auto& e : chain.entries) {
      if (!rel.vanishes(geo::apply(chain.field, e.function))) return false;
    }
    return true;
  });
  if (!regular) {
    suite.run("constraints.direct_lagrangian_match", [&](std::string&) {
      for (const auto& r : lag::lagrangian_vector_field(m).residuals) {
        if (!lag_rel.vanishes(r)) return false;
      }
      return true;
    });
  }

  // Numerical desk checks.
  if (options.numeric && lm.file.simulate) {
    std::optional<Trajectory> traj;
    suite.run("simulate.integrates", [&](std::string& detail) {
      traj = Simulator(lm, options.max_iter).run();
      detail = std::to_string(traj->times.size()) + " rows";
      return true;
    });
    if (traj) {
      const auto& mon = traj->monitors;
      const auto bounded = [](double value, double tol, std::string& detail) {
        detail = "max " + sci(value) + " (tolerance " + sci(tol) + ")";
        return value < tol;
      };
      suite.run("simulate.k_residual", [&](std::string& d) { return bounded(max_abs(mon.k_residual), kDynamicsTolerance, d); });
      suite.run("simulate.herglotz_dirac",
                [&](std::string& d) { return bounded(max_abs(mon.herglotz_dirac), kDynamicsTolerance, d); });
      suite.run("simulate.dissipation_law",
                [&](std::string& d) { return bounded(max_abs(mon.dissipation), kDynamicsTolerance, d); });
      if (!traj->constraint_names.empty()) {
        suite.run("simulate.constraint_drift", [&](std::string& d) {
          double worst = 0.0;
          for (const auto& row : mon.constraints) worst = std::max(worst, max_abs(row));
          return bounded(worst, kDriftTolerance, d);
        });
      }
    }
  }
  return suite.results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

Json verify_report(const LoadedModel& lm, const std::vector<CheckResult>& results) {
  Json j;
  j["command"] = "verify";
  j["model"] = lm.model.name;
  j["seed"] = sym::default_seed();
  Json checks = Json::array();
  for (const auto& r : results) {
    Json c;
    c["name"] = r.name;
    c["passed"] = r.passed;
    c["detail"] = r.detail;
    checks.push_back(c);
  }
  j["checks"] = checks;
  j["passed"] = all_passed(results);
  return j;
}

}  // namespace contactk::cli
