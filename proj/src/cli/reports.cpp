#include "contactk/cli/reports.hpp"

#include "contactk/error.hpp"
#include "contactk/evolution/evolution.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::cli {

namespace {

Json expr_list(const std::vector<Expr>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(sym::to_string(e));
  return out;
}

std::string_view reeb_kind(ham::ReebKind k) {
  switch (k) {
    case ham::ReebKind::Unique: return "Unique";
    case ham::ReebKind::Family: return "Family";
    case ham::ReebKind::None: return "None";
  }
  return "None";
}

Json entry_json(const con::ConstraintEntry& e, std::size_t index, const std::string& prefix) {
  Json j;
  j["label"] = prefix + std::to_string(index);
  j["function"] = sym::to_string(e.function);
  j["normalized"] = sym::to_string(e.normalized);
  j["provenance"] = std::string(con::to_string(e.provenance.kind));
  j["parent"] = e.provenance.parent ? Json(*e.provenance.parent) : Json(nullptr);
  return j;
}

Json operator_json(const evo::EvolutionOperator& k) {
  const auto& phase = *k.legendre.target;
  Json j;
  const auto comps = k.components();
  for (std::size_t i = 0; i < comps.size(); ++i) j[phase.coordinate(i).name] = sym::to_string(comps[i]);
  return j;
}

}  // namespace

std::string capped(const Expr& e) {
  const std::size_t size = sym::node_count(e);
  if (size > kReportSizeCap) return "<determined; " + std::to_string(size) + " nodes>";
  return sym::to_string(e);
}

Json to_json(const geo::OneForm& w) {
  Json j;
  for (std::size_t a = 0; a < w.c.size(); ++a) j[w.chart->coordinate(a).name] = sym::to_string(w.c[a]);
  return j;
}

Json to_json(const geo::VectorField& x) {
  Json j;
  for (std::size_t a = 0; a < x.c.size(); ++a) j[x.chart->coordinate(a).name] = sym::to_string(x.c[a]);
  return j;
}

Json analyze_report(const LoadedModel& lm) {
  const auto& m = lm.model;
  Json j;
  j["command"] = "analyze";
  j["model"] = m.name;
  j["seed"] = sym::default_seed();
  j["lagrangian"] = sym::to_string(m.L);
  j["energy"] = sym::to_string(lag::energy(m));
  j["eta_L"] = to_json(lag::contact_one_form(m));

  Json hess = Json::array();
  for (const auto& row : lag::hessian(m)) hess.push_back(expr_list(row));
  j["hessian"] = hess;
  j["rank"] = lm.regularity.rank;
  j["regularity"] = lm.regularity.regular ? "Regular" : "Singular";
  Json kernel = Json::array();
  for (const auto& k : lm.regularity.kernel) kernel.push_back(expr_list(k));
  j["kernel"] = kernel;

  Json legendre;
  const auto fl = lag::legendre_map(m);
  for (const auto& p : fl.target->fibers()) legendre[p.name] = sym::to_string(fl.bindings.at(p.name));
  j["legendre"] = legendre;

  j["reeb_L"] = lm.regularity.regular ? to_json(lag::reeb_field(m)) : Json(nullptr);
  j["hamiltonian"] = sym::to_string(lm.H);
  j["hamiltonian_source"] = lm.hamiltonian_derived ? "derived" : "model file";
  j["primaries"] = expr_list(lm.primaries);
  j["primaries_source"] = lm.primaries_derived ? "derived" : (lm.primaries.empty() ? "none" : "model file");

  const ham::RestrictedSurface surface =
      lm.primaries.empty() ? ham::restrict_to(lm.phase, {}) : con::primary_surface(lm.phase, lm.primaries);
  Json eliminated = Json::object();
  for (const auto& [name, value] : surface.eliminated) eliminated[name] = sym::to_string(value);
  j["surface"] = {{"eliminated", eliminated}, {"eta0", to_json(surface.eta0)}};
  const auto reeb = ham::reeb_existence(surface.eta0);
  Json r;
  r["kind"] = std::string(reeb_kind(reeb.kind));
  r["field"] = reeb.kind == ham::ReebKind::None ? Json(nullptr) : to_json(reeb.field);
  r["inconsistencies"] = expr_list(reeb.inconsistencies);
  j["reeb_eta0"] = r;
  return j;
}

Json constraints_report(const LoadedModel& lm, int max_iter) {
  const auto analysis = analyze_chain(lm, max_iter);
  const auto& chain = analysis.chain;
  Json j;
  j["command"] = "constraints";
  j["model"] = lm.model.name;
  j["seed"] = sym::default_seed();
  j["status"] = std::string(con::to_string(chain.status));
  j["max_iter"] = max_iter;

  Json ham_entries = Json::array();
  for (std::size_t i = 0; i < chain.entries.size(); ++i) ham_entries.push_back(entry_json(chain.entries[i], i, "phi_"));
  j["hamiltonian_chain"] = ham_entries;

  Json free = Json::array();
  for (const auto& fp : chain.free_parameters) free.push_back(fp.symbol.name);
  j["free_functions"] = free;
  Json det = Json::object();
  for (const auto& fp : chain.free_parameters) {
    const auto it = chain.determined_multipliers.find(fp.symbol.name);
    det[fp.symbol.name] = it == chain.determined_multipliers.end() ? Json(nullptr) : Json(capped(it->second));
  }
  j["determined"] = det;
  j["field"] = to_json(chain.field);

  Json lag_entries = Json::array();
  for (std::size_t i = 0; i < analysis.lagrangian.size(); ++i) {
    lag_entries.push_back(entry_json(analysis.lagrangian[i], i + 1, "chi_"));
  }
  j["lagrangian_chain"] = lag_entries;

  Json proj = Json::array();
  for (std::size_t i = 0; i < chain.entries.size(); ++i) {
    const auto pc = evo::projectability_check(lm.model, lm.H, lm.primaries, chain.entries[i].function);
    Json p;
    p["label"] = "phi_" + std::to_string(i);
    p["verdict"] = pc.projectable ? "Projectable" : "Obstructed";
    Json obs = Json::array();
    for (auto mu : pc.obstructing) obs.push_back("phi_" + std::to_string(mu));
    p["obstructed_by"] = obs;
    p["cross_check"] = pc.cross_check;
    proj.push_back(p);
  }
  j["projectability"] = proj;
  return j;
}

Json evolution_report(const LoadedModel& lm) {
  const auto& m = lm.model;
  const auto direct = evo::build_k_direct(m);
  const auto via_b = evo::build_k_via_B(m);
  const auto tulczyjew = evo::build_k_tulczyjew(m);
  Json j;
  j["command"] = "evolution";
  j["model"] = m.name;
  j["seed"] = sym::default_seed();
  j["K"] = {{"direct", operator_json(direct)}, {"via_B", operator_json(via_b)}, {"tulczyjew", operator_json(tulczyjew)}};
  j["agreement"] = {{"direct_vs_B", evo::same_operator(direct, via_b)},
                    {"direct_vs_tulczyjew", evo::same_operator(direct, tulczyjew)}};
  const auto mult = evo::solve_multipliers(m, lm.H, lm.primaries);
  Json lambdas = Json::array();
  for (const auto& l : mult.lambdas) lambdas.push_back(sym::to_string(l));
  j["lambdas"] = lambdas;
  j["duality"] = mult.duality_holds;
  bool decomposition = true;
  for (const auto& r : evo::decompose_k(m, lm.H, lm.primaries)) decomposition = decomposition && sym::is_zero(r);
  j["decomposition_zero"] = decomposition;
  return j;
}

}  // namespace contactk::cli
