#include "contactk/cli/session.hpp"

#include "contactk/error.hpp"
#include "contactk/evolution/evolution.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::cli {

namespace {

Expr parse_located(const Located& v, const sym::SymbolTable& table, const std::string& source, const std::string& what) {
  try {
    return sym::parse(v.text, table);
  } catch (const SyntaxError& e) {
    throw InputError(located_message(source, v.line, v.column + e.position(), what + ": " + e.what()));
  } catch (const UnknownSymbol& e) {
    throw InputError(located_message(source, v.line, v.column + e.position(), what + ": " + e.what()));
  }
}

}  // namespace

LoadedModel load(const ModelFile& file) {
  std::vector<std::string> params;
  for (const auto& [name, value] : file.parameters) params.push_back(name);
  geo::ChartPtr chart;
  try {
    chart = geo::make_velocity_chart(file.coordinates, params);
  } catch (const Error& e) {
    throw InputError(file.source + ": " + e.what());
  }
  const Expr L = parse_located(file.lagrangian, chart->symbol_table(), file.source, "lagrangian");

  LoadedModel lm{file, lag::make_model(file.name, chart, L), geo::phase_chart_for(*chart), {}, {}, false, {}, false, {}};
  for (const auto& [name, value] : file.parameters) lm.parameter_values[name] = value;
  lm.regularity = lag::classify_regularity(lm.model);

  const auto phase_table = lm.phase->symbol_table();
  if (file.hamiltonian) {
    lm.H = parse_located(*file.hamiltonian, phase_table, file.source, "hamiltonian");
    try {
      ham::make_model(lm.phase, lm.H);
    } catch (const ModelError& e) {
      throw InputError(located_message(file.source, file.hamiltonian->line, file.hamiltonian->column, e.what()));
    }
    const auto fl = lag::legendre_map(lm.model);
    if (!sym::is_zero(fl.pull(lm.H) - lag::energy(lm.model))) {
      throw InputError(located_message(file.source, file.hamiltonian->line, file.hamiltonian->column,
                                       "hamiltonian does not pull back to the Lagrangian energy"));
    }
  } else {
    auto derived = con::derive_hamiltonian(lm.model);
    if (auto* need = std::get_if<con::NeedsUserInput>(&derived)) throw UserInputRequired(need->reason);
    lm.H = std::get<con::DerivedHamiltonian>(derived).H;
    lm.hamiltonian_derived = true;
  }

  if (!file.primaries.empty()) {
    for (const auto& p : file.primaries) lm.primaries.push_back(parse_located(p, phase_table, file.source, "primary"));
  } else if (!lm.regularity.regular) {
    auto found = con::primary_constraints(lm.model);
    if (auto* need = std::get_if<con::NeedsUserInput>(&found)) throw UserInputRequired(need->reason);
    lm.primaries = std::get<std::vector<Expr>>(found);
    lm.primaries_derived = true;
  }
  const auto fl = lag::legendre_map(lm.model);
  for (std::size_t i = 0; i < lm.primaries.size(); ++i) {
    if (!sym::is_zero(fl.pull(lm.primaries[i]))) {
      const auto& where = file.primaries.empty() ? file.lagrangian : file.primaries[i];
      throw InputError(located_message(file.source, where.line, where.column,
                                       "primary constraint does not vanish on the Legendre image: " +
                                           sym::to_string(lm.primaries[i])));
    }
  }
  return lm;
}

ChainAnalysis analyze_chain(const LoadedModel& lm, int max_iter) {
  ham::RestrictedSurface surface = lm.primaries.empty() ? ham::restrict_to(lm.phase, {})
                                                        : con::primary_surface(lm.phase, lm.primaries);
  const Expr h0 = sym::substitute(lm.H, surface.eliminated);
  auto chain = con::run_constraint_algorithm(h0, surface.eta0, lm.primaries, max_iter);
  auto lagrangian = con::lagrangian_chain_via_k(evo::build_k_direct(lm.model), chain);
  return ChainAnalysis{std::move(surface), h0, std::move(chain), std::move(lagrangian)};
}

std::vector<std::string> velocity_variables(const LoadedModel& lm) {
  std::vector<std::string> out;
  for (const auto& s : lm.model.chart->coordinates()) out.push_back(s.name);
  for (const auto& s : lm.model.chart->parameters()) out.push_back(s.name);
  return out;
}

}  // namespace contactk::cli
