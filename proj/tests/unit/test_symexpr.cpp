#include <cmath>
#include <random>

#include "contactk/error.hpp"
#include "contactk/symexpr/compiled.hpp"
#include "contactk/symexpr/linear_solve.hpp"
#include "contactk/symexpr/normalize.hpp"
#include "contactk/symexpr/parser.hpp"
#include "contactk/symexpr/relation_set.hpp"
#include "contactk/symexpr/zero_test.hpp"
#include "doctest.h"
#include "corpus.hpp"

using namespace contactk;
using namespace contactk::sym;

namespace {

SymbolTable pendulum_table() {
  return SymbolTable({
      Symbol("r", SymbolRole::Position), Symbol("theta", SymbolRole::Position), Symbol("mu", SymbolRole::Position),
      Symbol("v_r", SymbolRole::Velocity), Symbol("v_theta", SymbolRole::Velocity),
      Symbol("v_mu", SymbolRole::Velocity), Symbol("p_r", SymbolRole::Momentum),
      Symbol("p_theta", SymbolRole::Momentum), Symbol("p_mu", SymbolRole::Momentum),
      Symbol("s", SymbolRole::Action), Symbol("m", SymbolRole::Parameter), Symbol("g", SymbolRole::Parameter),
      Symbol("l", SymbolRole::Parameter), Symbol("gamma", SymbolRole::Parameter),
      Symbol("q", SymbolRole::Position), Symbol("v", SymbolRole::Velocity),
      Symbol("x", SymbolRole::Auxiliary), Symbol("y", SymbolRole::Auxiliary),
  });
}

Expr P(const std::string& text) {
  static const SymbolTable table = pendulum_table();
  return parse(text, table);
}

Symbol S(const std::string& name) { return *pendulum_table().find(name); }

double eval_at(const Expr& e, const std::vector<std::string>& names, const std::vector<double>& values) {
  CompiledSystem sys(std::span<const Expr>(&e, 1), names);
  return sys.evaluate(values)[0];
}

}  // namespace

TEST_CASE("parse builds canonical expressions") {
  CHECK(P("q + v - q - v").is_zero());
  CHECK(P("v_r^2/2") == P("(1/2)*v_r*v_r"));
  CHECK(P("m*g*(l - r*cos(theta))") == P("m*g*l - m*g*r*cos(theta)"));
  CHECK(P("0.25") == rational(1, 4));
  CHECK(P("-x^2") == -(P("x") * P("x")));
  CHECK(P("2^-1") == rational(1, 2));
}

TEST_CASE("parse errors carry positions") {
  try {
    P("q + * v");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 4);
    CHECK(!e.expected().empty());
  }
  try {
    P("q + w");
    FAIL("expected UnknownSymbol");
  } catch (const UnknownSymbol& e) {
    CHECK(e.identifier() == "w");
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(P("sin q"), SyntaxError);
  CHECK_THROWS_AS(P("(q + v"), SyntaxError);
  CHECK_THROWS_AS(P("q^x"), SyntaxError);
  CHECK_THROWS_AS(P("q/0"), SyntaxError);
}

TEST_CASE("symbol table rejects reserved and duplicate names") {
  SymbolTable t;
  t.add(Symbol("a"));
  CHECK_THROWS_AS(t.add(Symbol("a")), Error);
  CHECK_THROWS_AS(t.add(Symbol("sin")), Error);
}

TEST_CASE("printing round-trips through the parser") {
  const SymbolTable table = pendulum_table();
  for (const auto& e : test::corpus(table, 60, 11)) {
    const std::string text = to_string(e);
    CAPTURE(text);
    CHECK(parse(text, table) == e);
  }
  CHECK(to_string(P("p_r^2/(2*m)")) == "p_r^2/(2*m)");
  CHECK(to_string(P("-x/3 + 1")) == "-x/3 + 1");
}

TEST_CASE("canonicalization is idempotent") {
  const SymbolTable table = pendulum_table();
  for (const auto& e : test::corpus(table, 80, 5)) {
    Expr once = canonicalize(e);
    CHECK(once == e);
    CHECK(canonicalize(once) == once);
  }
}

TEST_CASE("quotients by sums cancel") {
  Expr num = P("x^2 - y^2");
  Expr den = P("x + y");
  Expr q = num / den;
  CHECK(is_zero(q - P("x - y")));
  CHECK((P("x + y") / P("x + y")).is_one());
  CHECK((P("2*x + 2*y") / P("x + y")) == Expr(2));
  Expr r = P("1/(x + y)") * P("3*x + 3*y");
  CHECK(r == Expr(3));
}

TEST_CASE("diff: closed forms") {
  CHECK(diff(P("sin(q)"), S("q")) == P("cos(q)"));
  const Expr L = P("m*(v_r^2 + r^2*v_theta^2)/2 - m*g*(l - r*cos(theta)) + mu*(r - l) - gamma*s");
  CHECK(diff(L, S("v_theta")) == P("m*r^2*v_theta"));
  CHECK(diff(P("7"), S("q")).is_zero());
  CHECK(diff(P("ln(x)"), S("x")) == P("1/x"));
  CHECK(diff(P("exp(2*x)"), S("x")) == P("2*exp(2*x)"));
  CHECK(diff(P("1/(x + y)"), S("x")) == P("-1/(x + y)^2"));
}

TEST_CASE("diff agrees with central finite differences on a corpus") {
  const SymbolTable table = pendulum_table();
  const std::vector<std::string> names = test::corpus_symbol_names();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  int checked = 0;
  for (const auto& e : test::corpus(table, 30, 3)) {
    for (const auto& xname : names) {
      if (!depends_on(e, xname)) continue;
      const Expr d = diff(e, Symbol(xname));
      const std::size_t xi = static_cast<std::size_t>(
          std::find(names.begin(), names.end(), xname) - names.begin());
      for (int k = 0; k < 20; ++k) {
        std::vector<double> pt(names.size());
        for (auto& v : pt) v = dist(rng);
        const double h = 1e-6;
        auto plus = pt;
        auto minus = pt;
        plus[xi] += h;
        minus[xi] -= h;
        const double fd = (eval_at(e, names, plus) - eval_at(e, names, minus)) / (2 * h);
        const double exact = eval_at(d, names, pt);
        CAPTURE(to_string(e));
        CAPTURE(xname);
        CHECK(std::fabs(exact - fd) / (1 + std::fabs(exact)) < 1e-6);
      }
      ++checked;
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("diff is linear") {
  const SymbolTable table = pendulum_table();
  auto corpus = test::corpus(table, 20, 17);
  for (std::size_t i = 0; i + 1 < corpus.size(); ++i) {
    const Expr a = rational(3, 7);
    const Expr lhs = diff(a * corpus[i] + corpus[i + 1], Symbol("x"));
    const Expr rhs = a * diff(corpus[i], Symbol("x")) + diff(corpus[i + 1], Symbol("x"));
    CHECK(is_zero(lhs - rhs));
  }
}

TEST_CASE("substitution obeys the chain rule") {
  const SymbolTable table = pendulum_table();
  auto outer = test::corpus(table, 20, 23);
  auto inner = test::corpus(table, 20, 29);
  const Symbol x("x");
  const Symbol t("y");
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Expr& e = outer[i];
    const Expr& g = inner[i];
    const Bindings b{{"x", g}};
    const Expr lhs = diff(substitute(e, b), t);
    const Expr rhs = substitute(diff(e, x), b) * diff(g, t) + substitute(diff(e, t), b);
    CAPTURE(to_string(e));
    CAPTURE(to_string(g));
    CHECK(is_zero(lhs - rhs));
  }
}

TEST_CASE("substitute: closed forms") {
  CHECK(substitute(P("p_r^2/(2*m)"), {{"p_r", P("m*v_r")}}) == P("m*v_r^2/2"));
  const Expr dh = diff(P("p_theta^2/(2*m*r^2)"), S("p_theta"));
  CHECK(substitute(dh, {{"p_theta", P("m*r^2*v_theta")}}) == P("v_theta"));
  CHECK(substitute(P("x + y"), {{"x", P("y")}, {"y", P("x")}}) == P("x + y"));
}

TEST_CASE("zero test verdicts") {
  CHECK(zero_test(P("(q + v)^2 - q^2 - 2*q*v - v^2")) == ZeroVerdict::ZeroCanonical);
  CHECK(zero_test(P("sin(2*theta) - 2*sin(theta)*cos(theta)")) == ZeroVerdict::ZeroProbabilistic);
  // The Pythagorean pass makes this identity canonical.
  CHECK(zero_test(P("sin(theta)^2 + cos(theta)^2 - 1")) == ZeroVerdict::ZeroCanonical);
  CHECK(zero_test(P("x*sin(theta)^2 + x*cos(theta)^2 - x")) == ZeroVerdict::ZeroCanonical);
  CHECK(zero_test(P("exp(x)*exp(y) - exp(x + y)")) == ZeroVerdict::ZeroProbabilistic);
  CHECK(zero_test(P("x - y")) == ZeroVerdict::NonZero);
  CHECK(zero_test(P("3")) == ZeroVerdict::NonZero);
  CHECK(is_zero(P("ln(x^2 + 1) - ln(x^2 + 1)")));
}

TEST_CASE("zero test is reproducible for a fixed seed") {
  ZeroTestOptions o;
  o.seed = 7;
  const Expr e = P("sin(x)*y - x");
  CHECK(zero_test(e, o) == zero_test(e, o));
}

TEST_CASE("zero test has no false positives on a nonzero corpus") {
  const SymbolTable table = pendulum_table();
  const auto corpus = test::nonzero_corpus(table, 100);
  REQUIRE(corpus.size() == 100);
  int false_zero = 0;
  for (const auto& e : corpus) {
    if (is_zero(e)) ++false_zero;
  }
  CHECK(false_zero == 0);
}

TEST_CASE("solve_linear: unique solution") {
  const std::vector<Expr> eqs{P("x + y - 1"), P("x - y - 1")};
  const std::vector<Symbol> unk{S("x"), S("y")};
  auto r = solve_linear(eqs, unk);
  CHECK(r.solution.at("x") == Expr(1));
  CHECK(r.solution.at("y").is_zero());
  CHECK(r.free_parameters.empty());
  CHECK(r.consistency_residuals.empty());
}

TEST_CASE("solve_linear: free parameters and residuals") {
  const std::vector<Expr> eqs{P("x + y - r"), P("2*x + 2*y - 2*l"), P("q*v - 1")};
  const std::vector<Symbol> unk{S("x"), S("y")};
  auto r = solve_linear(eqs, unk);
  REQUIRE(r.free_parameters.size() == 1);
  CHECK(r.free_parameters[0].symbol.name == "f_1");
  CHECK(r.free_parameters[0].unknown.name == "y");
  CHECK(r.free_parameters[0].symbol.role == SymbolRole::FreeFunction);
  REQUIRE(r.consistency_residuals.size() == 2);
  CHECK(same_up_to_factor(r.consistency_residuals[0], P("r - l")));
  CHECK(same_up_to_factor(r.consistency_residuals[1], P("q*v - 1")));
  CHECK_THROWS_AS(solve_linear(std::vector<Expr>{P("x*y")}, unk), AffinityError);
}

TEST_CASE("solve_linear: back-substitution soundness on random systems") {
  std::mt19937_64 rng(99);
  const SymbolTable table = pendulum_table();
  const std::vector<Symbol> unk{Symbol("u1"), Symbol("u2"), Symbol("u3"), Symbol("u4")};
  for (int trial = 0; trial < 12; ++trial) {
    auto coeffs = test::corpus(table, 20, 1000 + trial);
    std::vector<Expr> eqs;
    const int rows = 2 + trial % 4;
    for (int i = 0; i < rows; ++i) {
      Expr eq = coeffs[static_cast<std::size_t>(4 * i % 20)];
      for (std::size_t j = 0; j < unk.size(); ++j) {
        if ((rng() % 3) == 0) continue;
        eq += coeffs[(static_cast<std::size_t>(i) * 5 + j + 1) % 20] * Expr(unk[j]);
      }
      eqs.push_back(eq);
    }
    if (trial % 3 == 0) eqs.push_back(eqs[0] * P("x") + eqs[1]);
    auto r = solve_linear(eqs, unk);
    Bindings values = r.solution;
    Bindings free_values;
    for (const auto& fp : r.free_parameters) free_values.emplace(fp.symbol.name, coeffs[rng() % 20]);
    for (auto& [name, v] : values) v = substitute(v, free_values);
    RelationSet relations({Symbol("q", SymbolRole::Position), Symbol("r", SymbolRole::Position),
                           Symbol("theta", SymbolRole::Position), Symbol("v", SymbolRole::Velocity),
                           Symbol("x"), Symbol("y")});
    bool reducible = true;
    for (const auto& c : r.consistency_residuals) {
      try {
        relations.add(c);
      } catch (const PivotAmbiguity&) {
        reducible = false;
      }
    }
    if (!reducible) continue;
    for (const auto& eq : eqs) CHECK(relations.vanishes(substitute(eq, values)));
  }
}

TEST_CASE("normalize strips constants and parameter factors") {
  CHECK(normalize(P("-2*p_r/m")) == P("p_r"));
  CHECK(normalize(P("(1/m)*(p_theta^2/(m*r^3) + m*g*cos(theta) + mu - gamma*p_r)")) ==
        normalize(P("p_theta^2/r^3 + m^2*g*cos(theta) + m*mu - gamma*m*p_r")));
  const Expr n = normalize(P("3*gamma*x*y/2 - 6*gamma*y"));
  CHECK(normalize(n) == n);
  CHECK(leading_coefficient(n) > 0);
  CHECK(normalize(Expr()).is_zero());
  CHECK(same_up_to_factor(P("r - l"), P("2*l - 2*r")));
}

TEST_CASE("relation set decides vanishing on a constraint set") {
  RelationSet rel({S("p_r"), S("p_theta"), S("p_mu"), S("r"), S("theta"), S("mu"), S("s")});
  CHECK(rel.add(P("p_mu")) == RelationSet::AddResult::Added);
  CHECK(rel.add(P("r - l")) == RelationSet::AddResult::Added);
  CHECK(rel.add(P("p_r")) == RelationSet::AddResult::Added);
  CHECK(rel.add(P("p_theta^2/r^3 + m^2*g*cos(theta) + m*mu - gamma*m*p_r")) == RelationSet::AddResult::Added);
  CHECK(rel.bindings().at("mu") == P("-p_theta^2/(m*l^3) - m*g*cos(theta)"));
  CHECK(rel.vanishes(P("p_mu*r + p_r*theta")));
  CHECK(rel.vanishes(P("r^2 - l^2")));
  CHECK(!rel.vanishes(P("p_theta")));
  CHECK(rel.add(P("3*p_r + (r - l)*theta")) == RelationSet::AddResult::Dependent);
}

TEST_CASE("compiled evaluation matches exact evaluation") {
  const Expr e = P("x^3/(1 + y^2) - sin(x)*exp(y) + ln(x)");
  const double got = eval_at(e, {"x", "y"}, {1.25, -0.5});
  const double want = std::pow(1.25, 3) / 1.25 - std::sin(1.25) * std::exp(-0.5) + std::log(1.25);
  CHECK(got == doctest::Approx(want).epsilon(1e-14));
  CHECK_THROWS_AS(CompiledSystem(std::vector<Expr>{e}, {"x"}), Error);
}
