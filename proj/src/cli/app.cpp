#include "contactk/cli/app.hpp"

#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "contactk/cli/reports.hpp"
#include "contactk/cli/simulate.hpp"
#include "contactk/cli/verify.hpp"
#include "contactk/error.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::cli {

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
  if (!f) throw InputError("failed writing '" + path + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contact Lagrangian and Hamiltonian analysis of dissipative mechanical models", "contactk"};
  app.require_subcommand(1);
  std::string model_path;
  std::uint64_t seed = sym::kDefaultSeed;
  std::string json_path;
  std::string csv_path;
  int max_iter = 16;

  const auto add = [&](const std::string& name, const std::string& description) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("file", model_path, "model file")->required();
    sub->add_option("--seed", seed, "PRNG seed for probabilistic zero tests")->capture_default_str();
    sub->add_option("--json", json_path, "also write the JSON report to PATH");
    sub->add_option("--csv", csv_path, "write the trajectory CSV to PATH (simulate)");
    sub->add_option("--max-iter", max_iter, "constraint algorithm iteration cap")->check(CLI::PositiveNumber)
        ->capture_default_str();
    return sub;
  };
  auto* analyze = add("analyze", "geometry of the Lagrangian and its Legendre map");
  auto* constraints = add("constraints", "Hamiltonian and Lagrangian constraint chains");
  auto* evolution = add("evolution", "the evolution operator K and its decompositions");
  auto* simulate = add("simulate", "RK4 integration with residual monitors");
  auto* verify_cmd = add("verify", "run every applicable invariant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "contactk: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    sym::set_default_seed(seed);
    const LoadedModel lm = load(load_model_file(model_path));
    Json report;
    int code = kExitOk;
    if (analyze->parsed()) {
      report = analyze_report(lm);
    } else if (constraints->parsed()) {
      report = constraints_report(lm, max_iter);
    } else if (evolution->parsed()) {
      report = evolution_report(lm);
    } else if (simulate->parsed()) {
      const Trajectory t = Simulator(lm, max_iter).run();
      report = simulate_report(lm, t);
      if (!csv_path.empty()) write_file(csv_path, to_csv(t));
    } else if (verify_cmd->parsed()) {
      VerifyOptions options;
      options.max_iter = max_iter;
      const auto results = verify(lm, options);
      report = verify_report(lm, results);
      if (!all_passed(results)) code = kExitVerificationFailed;
    }
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!json_path.empty()) write_file(json_path, text);
    return code;
  } catch (const StepRejected& e) {
    err << "contactk: step rejected: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const InputError& e) {
    err << "contactk: " << e.what() << '\n';
    return kExitInputError;
  } catch (const SyntaxError& e) {
    err << "contactk: " << e.what() << '\n';
    return kExitInputError;
  } catch (const UnknownSymbol& e) {
    err << "contactk: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ModelError& e) {
    err << "contactk: " << e.what() << '\n';
    return kExitInputError;
  } catch (const HamiltonianMismatch& e) {
    err << "contactk: " << e.what() << '\n';
    return kExitInputError;
  } catch (const PivotAmbiguity& e) {
    err << "contactk: pivot ambiguity: " << e.what() << '\n';
    return kExitNeedsUser;
  } catch (const UserInputRequired& e) {
    err << "contactk: needs user input: " << e.what() << '\n';
    return kExitNeedsUser;
  } catch (const SingularWithoutReduction& e) {
    err << "contactk: cannot reduce the singular dynamics: " << e.what() << '\n';
    return kExitNeedsUser;
  } catch (const std::exception& e) {
    err << "contactk: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace contactk::cli
