#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "contactk/cli/app.hpp"
#include "contactk/cli/simulate.hpp"
#include "contactk/cli/verify.hpp"
#include "contactk/error.hpp"
#include "doctest.h"

using namespace contactk;
using namespace contactk::cli;

namespace {

std::string model_path(const std::string& name) { return std::string(CONTACTK_MODELS_DIR) + "/" + name + ".model"; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "contactk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

LoadedModel from_text(const std::string& text) { return load(parse_model_file(text, "inline")); }

std::string message_of(const std::string& text) {
  try {
    from_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("model file reader") {
  const auto f = parse_model_file(
      "# header\n"
      "name = demo   # trailing comment\n"
      "coordinates = q, w\n"
      "lagrangian = v_q^2/2 + v_w^2/2 - k*q^2/2\n"
      "primary = p_q - v_q\n"
      "\n"
      "[parameters]\n"
      "k = 2.5\n"
      "[simulate]\n"
      "q = 1\n"
      "h = 0.01\n"
      "T = 1\n",
      "demo.model");
  CHECK(f.name == "demo");
  CHECK(f.coordinates == std::vector<std::string>{"q", "w"});
  CHECK(f.lagrangian.text == "v_q^2/2 + v_w^2/2 - k*q^2/2");
  CHECK(f.lagrangian.line == 4);
  CHECK(f.lagrangian.column == 14);
  REQUIRE(f.parameters.size() == 1);
  CHECK(f.parameters[0].second == 2.5);
  REQUIRE(f.primaries.size() == 1);
  REQUIRE(f.simulate);
  CHECK(f.simulate->h == 0.01);
  REQUIRE(f.simulate->initial.size() == 1);
  CHECK(f.simulate->initial[0].first == "q");
}

TEST_CASE("model file errors carry positions") {
  const auto error_of = [](const std::string& text) {
    try {
      parse_model_file(text, "bad.model");
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("name = a\ncolour = red\n").rfind("bad.model:2:", 0) == 0);
  CHECK(error_of("name = a\nname = b\n").find("duplicate key") != std::string::npos);
  CHECK(error_of("name = a\ncoordinates = q\nlagrangian = v_q\n[parameters]\nk = abc\n").rfind("bad.model:5:5:", 0) == 0);
  CHECK(error_of("[parameters\n").find("unterminated") != std::string::npos);
  CHECK(error_of("name = a\ncoordinates = q\n").find("missing 'lagrangian'") != std::string::npos);
  CHECK(error_of("name = a\ncoordinates = q, q\nlagrangian = v_q\n").find("duplicate coordinate") != std::string::npos);
  CHECK(error_of("name = a\ncoordinates = q\nlagrangian = v_q\n[simulate]\nh = -1\nT = 1\n").find("positive") !=
        std::string::npos);

  // Expression errors point into the value.
  const auto m = message_of("name = a\ncoordinates = q\nlagrangian = v_q^2 + zeta\n");
  CHECK(m.rfind("inline:3:", 0) == 0);
  CHECK(m.find("lagrangian") != std::string::npos);
}

TEST_CASE("loading checks user-supplied Hamiltonians and primaries") {
  const std::string base = "name = osc\ncoordinates = q\nlagrangian = v_q^2/2 - q^2/2\n";
  CHECK_NOTHROW(from_text(base + "hamiltonian = p_q^2/2 + q^2/2\n"));
  CHECK(message_of(base + "hamiltonian = p_q^2/2\n").find("energy") != std::string::npos);
  CHECK(message_of(base + "primary = p_q\n").find("does not vanish") != std::string::npos);
  CHECK_THROWS_AS(from_text("name = h\ncoordinates = x, y\nlagrangian = v_x^2/v_y\n"), UserInputRequired);

  const auto lm = from_text("name = p\ncoordinates = x, y\nlagrangian = v_x^2/2 - y*x\n");
  CHECK(lm.primaries_derived);
  REQUIRE(lm.primaries.size() == 1);
  CHECK(sym::to_string(lm.primaries[0]) == "p_y");
}

TEST_CASE("exit codes") {
  CHECK(invoke({"analyze", model_path("pendulum")}).code == kExitOk);
  CHECK(invoke({"constraints", model_path("cawley")}).code == kExitOk);
  CHECK(invoke({"evolution", model_path("oscillator")}).code == kExitOk);
  CHECK(invoke({"verify", model_path("pendulum")}).code == kExitOk);
  CHECK(invoke({"verify", model_path("cawley")}).code == kExitOk);
  CHECK(invoke({"verify", model_path("oscillator")}).code == kExitOk);
  CHECK(invoke({"analyze", "/nonexistent/x.model"}).code == kExitInputError);
  CHECK(invoke({"frobnicate", model_path("pendulum")}).code == kExitInputError);
  CHECK(invoke({"analyze", model_path("pendulum"), "--seed", "abc"}).code == kExitInputError);
  CHECK(invoke({"simulate", model_path("cawley")}).code == kExitInputError);
}

TEST_CASE("exit codes for models needing the user") {
  const auto write = [](const std::string& path, const std::string& text) {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs(text.c_str(), f);
    std::fclose(f);
  };
  const std::string homogeneous = "/tmp/contactk_homogeneous.model";
  write(homogeneous, "name = h\ncoordinates = x, y\nlagrangian = v_x^2/v_y\n");
  CHECK(invoke({"analyze", homogeneous}).code == kExitNeedsUser);

  // y never enters L: its evolution stays arbitrary.
  const std::string gauge = "/tmp/contactk_gauge.model";
  write(gauge, "name = g\ncoordinates = x, y\nlagrangian = v_x^2/2 - x^2/2\n[simulate]\nx = 1\nv_x = 0\ny = 0\nv_y = 0\nh = 0.01\nT = 1\n");
  const auto r = invoke({"simulate", gauge});
  CHECK(r.code == kExitNeedsUser);
  CHECK(r.err.find("free function") != std::string::npos);

  const std::string blowup = "/tmp/contactk_blowup.model";
  write(blowup, "name = b\ncoordinates = q\nlagrangian = v_q^2/2 + q^4\n[simulate]\nq = 1\nv_q = 1\nh = 0.01\nT = 5\n");
  CHECK(invoke({"simulate", blowup}).code == kExitVerificationFailed);

  const std::string broken = "/tmp/contactk_broken.model";
  write(broken, "name = b\ncoordinates = q\nlagrangian = v_q^2/2 +* q\n");
  const auto b = invoke({"analyze", broken});
  CHECK(b.code == kExitInputError);
  CHECK(b.err.find(broken + ":3:") != std::string::npos);
}

TEST_CASE("reports are deterministic for a fixed seed") {
  for (const char* cmd : {"analyze", "constraints", "evolution", "verify", "simulate"}) {
    for (const char* model : {"pendulum", "oscillator"}) {
      const auto a = invoke({cmd, model_path(model), "--seed", "99"});
      const auto b = invoke({cmd, model_path(model), "--seed", "99"});
      CHECK_MESSAGE(a.out == b.out, cmd << ' ' << model);
      CHECK(a.code == b.code);
    }
  }
  CHECK(invoke({"analyze", model_path("pendulum")}).out.find("\"seed\": 322377415") != std::string::npos);
}

TEST_CASE("monitors recomputed from CSV states match the CSV") {
  for (const char* model : {"oscillator", "pendulum"}) {
    const auto lm = load(load_model_file(model_path(model)));
    const Simulator sim(lm, 16);
    const auto traj = sim.run();
    const auto table = parse_csv(to_csv(traj));
    REQUIRE(table.rows.size() == traj.times.size());
    const std::size_t dim = traj.state_names.size();
    std::vector<std::vector<double>> states;
    for (const auto& row : table.rows) states.emplace_back(row.begin() + 1, row.begin() + 1 + static_cast<std::ptrdiff_t>(dim));
    const auto mon = sim.monitors(states, traj.h);

    const std::size_t base = 1 + dim + traj.momentum_names.size();
    REQUIRE(table.header[base] == "herglotz_dirac");
    double worst = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      worst = std::max(worst, std::fabs(row[base] - mon.herglotz_dirac[i]));
      worst = std::max(worst, std::fabs(row[base + 1] - mon.k_residual[i]));
      worst = std::max(worst, std::fabs(row[base + 2] - mon.dissipation[i]));
      worst = std::max(worst, std::fabs(row[base + 3] - mon.hamiltonian[i]));
      for (std::size_t k = 0; k < mon.constraints[i].size(); ++k) {
        worst = std::max(worst, std::fabs(row[base + 4 + k] - mon.constraints[i][k]));
      }
    }
    CHECK_MESSAGE(worst < 1e-12, model << " " << worst);

    // The JSON summary agrees with the CSV columns.
    const auto report = simulate_report(lm, traj);
    double hd = 0.0;
    for (const auto& row : table.rows) hd = std::max(hd, row[base]);
    CHECK(std::fabs(report["monitors"]["herglotz_dirac_max"].get<double>() - hd) < 1e-12);
    CHECK(report["rows"].get<std::size_t>() == row_count(traj.h, traj.T));
  }
}

TEST_CASE("mutating K is caught by the dynamical condition") {
  for (const char* model : {"pendulum", "cawley", "oscillator"}) {
    const auto lm = load(load_model_file(model_path(model)));
    VerifyOptions clean;
    clean.numeric = false;
    const auto good = verify(lm, clean);
    CHECK(all_passed(good));

    VerifyOptions mutated = clean;
    mutated.perturb_k = true;
    const auto bad = verify(lm, mutated);
    bool found = false;
    for (const auto& r : bad) {
      if (r.name == "evolution.dynamical_condition") {
        found = true;
        CHECK_FALSE(r.passed);
      }
    }
    CHECK(found);
    CHECK_FALSE(all_passed(bad));
  }
}

TEST_CASE("simulation") {
  CHECK(row_count(1e-3, 10) == 10001);
  CHECK(row_count(0.3, 1) == 4);

  const auto osc = load(load_model_file(model_path("oscillator")));
  const Simulator sim(osc, 16);
  CHECK_FALSE(sim.reduced());

  // q = v = 0 is stationary while s decays by sdot = L = -gamma s.
  const auto rest = sim.run(1e-2, 2, {{"q", 0.0}, {"v_q", 0.0}, {"s", 1.0}});
  for (std::size_t i = 0; i < rest.times.size(); ++i) {
    CHECK(rest.states[i][0] == 0.0);
    CHECK(rest.states[i][1] == 0.0);
    CHECK(std::fabs(rest.states[i][2] - std::exp(-0.5 * rest.times[i])) < 1e-9);
  }

  CHECK_THROWS_AS(sim.run(1e-2, 1, {{"v_q", 0.0}}), InputError);
  CHECK_THROWS_AS(sim.run(1e-2, 1, {{"q", 0.0}, {"v_q", 0.0}, {"w", 1.0}}), InputError);
  CHECK_THROWS_AS(sim.run(1e-2, 0.02, {{"q", 0.0}, {"v_q", 0.0}}), InputError);

  const auto pend = load(load_model_file(model_path("pendulum")));
  const Simulator ps(pend, 16);
  CHECK(ps.reduced());
  CHECK(ps.integrated() == std::vector<std::string>{"theta", "v_theta", "s"});
  CHECK(ps.eliminated().count("r") == 1);
  CHECK_NOTHROW(ps.run(1e-2, 0.1, {{"theta", 0.5}, {"v_theta", 0.0}, {"r", 1.0}, {"v_r", 0.0}}));
  CHECK_THROWS_AS(ps.run(1e-2, 0.1, {{"theta", 0.5}, {"v_theta", 0.0}, {"r", 1.1}}), InputError);
}
