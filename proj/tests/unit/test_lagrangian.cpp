#include "doctest.h"

#include "contactk/error.hpp"
#include "contactk/symexpr/normalize.hpp"
#include "contactk/symexpr/zero_test.hpp"
#include "models.hpp"

using namespace contactk;
using sym::Expr;

namespace {

bool same(const Expr& a, const Expr& b) { return sym::is_zero(a - b); }

geo::OneForm form_from(const geo::ChartPtr& chart, const std::vector<std::pair<std::string, Expr>>& coeffs) {
  geo::OneForm w(chart);
  for (const auto& [name, c] : coeffs) w.c[*chart->index_of(name)] = c;
  return w;
}

}  // namespace

TEST_CASE("energy of the reference models") {
  const auto p = test::pendulum();
  CHECK(same(lag::energy(p.model),
             p.vel("m*(v_r^2 + r^2*v_theta^2)/2 + m*g*(l - r*cos(theta)) - mu*(r - l) + gamma*s")));
  const auto c = test::cawley();
  CHECK(same(lag::energy(c.model), c.vel("v_x*v_z - y*z^2/2")));
  auto chart = geo::make_velocity_chart({"q"}, {"gamma"});
  const auto m = lag::make_model("velocity-free", chart, sym::parse("gamma*s", chart->symbol_table()));
  CHECK(same(lag::energy(m), sym::parse("-gamma*s", chart->symbol_table())));
}

TEST_CASE("contact one-form coefficients") {
  const auto f = test::free_particle();
  const auto& ch = f.model.chart;
  CHECK(geo::is_zero(lag::contact_one_form(f.model) - form_from(ch, {{"s", Expr(1)}, {"q", -f.vel("v_q")}})));

  const auto p = test::pendulum();
  const auto pc = p.model.chart;
  const auto eta_p = lag::contact_one_form(p.model);
  CHECK(geo::is_zero(eta_p - form_from(pc, {{"s", Expr(1)},
                                            {"r", -p.vel("m*v_r")},
                                            {"theta", -p.vel("m*r^2*v_theta")}})));
  CHECK(eta_p.c[*pc->index_of("mu")].is_zero());

  const auto c = test::cawley();
  const auto cc = c.model.chart;
  CHECK(geo::is_zero(lag::contact_one_form(c.model) -
                     form_from(cc, {{"s", Expr(1)}, {"x", -c.vel("v_z")}, {"y", c.vel("gamma*s")}, {"z", -c.vel("v_x")}})));
}

TEST_CASE("exterior derivative") {
  auto phase = geo::canonical_phase_chart(1);
  const auto w = lag::exterior_derivative(geo::canonical_one_form(phase));
  const auto q = *phase->index_of("q");
  const auto p = *phase->index_of("p_q");
  CHECK(w.c[q][p] == Expr(1));
  CHECK(w.c[p][q] == Expr(-1));
  CHECK(geo::is_antisymmetric(w));

  const auto tab = phase->symbol_table();
  CHECK(geo::is_zero(lag::exterior_derivative(geo::d(sym::parse("q*sin(s)", tab), phase))));

  // d(eta_L) against the block formula: -L_{v^i q^j} dq^j^dq^i - L_{v^i v^j} dv^j^dq^i - L_{v^i s} ds^dq^i.
  for (const auto& fx : test::all_fixtures()) {
    const auto& ch = *fx.model.chart;
    geo::TwoForm expected(fx.model.chart);
    for (std::size_t i = 0; i < ch.n(); ++i) {
      const Expr Lv = sym::diff(fx.model.L, ch.fibers()[i]);
      const std::size_t qi = ch.position_index(i);
      for (std::size_t b = 0; b < ch.dimension(); ++b) {
        const Expr c = -sym::diff(Lv, ch.coordinate(b));
        expected.c[b][qi] = expected.c[b][qi] + c;
        expected.c[qi][b] = expected.c[qi][b] - c;
      }
    }
    CHECK_MESSAGE(geo::is_zero(lag::exterior_derivative(lag::contact_one_form(fx.model)) - expected), fx.model.name);
  }
}

TEST_CASE("d squared vanishes on exact forms") {
  auto chart = geo::make_velocity_chart({"x", "y"}, {"m"});
  const auto tab = chart->symbol_table();
  const std::vector<std::string> samples = {"x*v_x*sin(s)", "exp(x/4)*v_y^2 + m*y", "ln(x^2 + 1)*cos(v_x)",
                                            "(x + y)^3/(v_x^2 + 1)", "s*x*y*v_x*v_y"};
  for (const auto& text : samples) {
    CHECK(geo::is_zero(lag::exterior_derivative(geo::d(sym::parse(text, tab), chart))));
  }
}

TEST_CASE("Legendre map bindings and pullback identity") {
  const auto p = test::pendulum();
  const auto fl = lag::legendre_map(p.model);
  CHECK(same(fl.bindings.at("p_r"), p.vel("m*v_r")));
  CHECK(same(fl.bindings.at("p_theta"), p.vel("m*r^2*v_theta")));
  CHECK(fl.bindings.at("p_mu").is_zero());

  const auto c = test::cawley();
  const auto fc = lag::legendre_map(c.model);
  CHECK(same(fc.bindings.at("p_x"), c.vel("v_z")));
  CHECK(same(fc.bindings.at("p_y"), c.vel("-gamma*s")));
  CHECK(same(fc.bindings.at("p_z"), c.vel("v_x")));

  for (const auto& fx : test::all_fixtures()) {
    const auto f = lag::legendre_map(fx.model);
    const auto pulled = f.pull(geo::canonical_one_form(f.target));
    CHECK_MESSAGE(geo::is_zero(pulled - lag::contact_one_form(fx.model)), fx.model.name);
  }
  CHECK(same(fc.pull(c.ph("p_y + gamma*s")), Expr(0)));
}

TEST_CASE("Hessian and regularity") {
  const auto p = test::pendulum();
  const auto w = lag::hessian(p.model);
  CHECK(same(w[0][0], p.vel("m")));
  CHECK(same(w[1][1], p.vel("m*r^2")));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) CHECK(w[i][j].is_zero());
    }
  }
  CHECK(w[2][2].is_zero());
  const auto rp = lag::classify_regularity(p.model);
  CHECK_FALSE(rp.regular);
  CHECK(rp.rank == 2);
  REQUIRE(rp.kernel.size() == 1);
  CHECK(rp.kernel[0][0].is_zero());
  CHECK(rp.kernel[0][1].is_zero());
  CHECK(same(rp.kernel[0][2], Expr(1)));

  const auto c = test::cawley();
  const auto wc = lag::hessian(c.model);
  const int expected[3][3] = {{0, 0, 1}, {0, 0, 0}, {1, 0, 0}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(same(wc[i][j], Expr(expected[i][j])));
  }
  const auto rc = lag::classify_regularity(c.model);
  CHECK_FALSE(rc.regular);
  CHECK(rc.rank == 2);
  REQUIRE(rc.kernel.size() == 1);
  CHECK(same(rc.kernel[0][1], Expr(1)));

  auto chart = geo::make_velocity_chart({"x", "y"}, {});
  const auto two = lag::make_model("two", chart, sym::parse("(v_x^2 + v_y^2)/2", chart->symbol_table()));
  CHECK(lag::classify_regularity(two).regular);
  CHECK(same(lag::hessian(test::free_particle().model)[0][0], Expr(1)));
}

TEST_CASE("Hessian symmetry") {
  for (const auto& fx : test::all_fixtures()) {
    const auto w = lag::hessian(fx.model);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = 0; j < w.size(); ++j) CHECK(same(w[i][j], w[j][i]));
    }
  }
}

TEST_CASE("Reeb field of regular Lagrangians") {
  auto chart = geo::make_velocity_chart({"q"}, {"gamma"});
  const auto tab = chart->symbol_table();
  const auto damped = lag::make_model("damped", chart, sym::parse("v_q^2/2 - gamma*s", tab));
  const auto r1 = lag::reeb_field(damped);
  CHECK(same(r1.c[chart->action_index()], Expr(1)));
  CHECK(r1.c[chart->fiber_index(0)].is_zero());
  CHECK(r1.c[chart->position_index(0)].is_zero());

  // W = e^s, L_sv = e^s v, so R = d/ds - v d/dv.
  const auto scaled = lag::make_model("scaled", chart, sym::parse("exp(s)*v_q^2/2", tab));
  const auto r2 = lag::reeb_field(scaled);
  CHECK(same(r2.c[chart->action_index()], Expr(1)));
  CHECK(same(r2.c[chart->fiber_index(0)], sym::parse("-v_q", tab)));

  for (const auto* m : {&damped, &scaled}) {
    const auto r = lag::reeb_field(*m);
    const auto eta = lag::contact_one_form(*m);
    CHECK(geo::is_zero(geo::interior(r, lag::exterior_derivative(eta))));
    CHECK(same(geo::interior(r, eta), Expr(1)));
  }
  CHECK_THROWS_AS(lag::reeb_field(test::pendulum().model), SingularModel);
}

TEST_CASE("Herglotz-Euler-Lagrange residuals") {
  const auto o = test::oscillator();
  const auto tab = o.model.chart->symbol_table();
  const sym::Symbol f("f", sym::SymbolRole::Auxiliary);
  const sym::Symbol sdot("sdot", sym::SymbolRole::Auxiliary);
  const auto res = lag::herglotz_el_residuals(o.model, {Expr(f)}, Expr(sdot));
  REQUIRE(res.size() == 2);
  CHECK(same(res[0], Expr(f) + o.vel("q + gamma*v_q")));
  CHECK(same(res[1], Expr(sdot) - o.model.L));

  const auto fp = test::free_particle();
  const auto r0 = lag::herglotz_el_residuals(fp.model, {Expr(f)}, Expr(sdot));
  CHECK(same(r0[0], Expr(f)));

  // On r = l, v_r = 0 the theta equation reads m l^2 f_theta + m g l sin(theta) + gamma m l^2 v_theta.
  const auto p = test::pendulum();
  const sym::Symbol fr("f_r", sym::SymbolRole::Auxiliary), ft("f_t", sym::SymbolRole::Auxiliary),
      fm("f_m", sym::SymbolRole::Auxiliary);
  const auto pr = lag::herglotz_el_residuals(p.model, {Expr(fr), Expr(ft), Expr(fm)}, Expr(sdot));
  const sym::Bindings on_circle{{"r", p.vel("l")}, {"v_r", Expr(0)}};
  const Expr theta_eq = sym::substitute(pr[1], on_circle);
  CHECK(sym::same_up_to_factor(theta_eq, Expr(ft) * p.vel("m*l") + p.vel("m*g*sin(theta) + gamma*m*l*v_theta")));
}

TEST_CASE("Lagrangian vector field") {
  const auto o = test::oscillator();
  const auto& ch = *o.model.chart;
  const auto xo = lag::lagrangian_vector_field(o.model);
  CHECK(xo.free_parameters.empty());
  CHECK(xo.residuals.empty());
  CHECK(same(xo.field.c[ch.position_index(0)], o.vel("v_q")));
  CHECK(same(xo.field.c[ch.fiber_index(0)], o.vel("-q - gamma*v_q")));
  CHECK(same(xo.field.c[ch.action_index()], o.model.L));

  const auto fp = test::free_particle();
  const auto xf = lag::lagrangian_vector_field(fp.model);
  CHECK(xf.field.c[1].is_zero());
  CHECK(same(xf.field.c[2], fp.model.L));

  const auto p = test::pendulum();
  const auto& pc = *p.model.chart;
  const auto xp = lag::lagrangian_vector_field(p.model);
  REQUIRE(xp.free_parameters.size() == 1);
  CHECK(sym::depends_on(xp.field.c[pc.fiber_index(2)], xp.free_parameters[0].symbol.name));
  REQUIRE(xp.residuals.size() == 1);
  CHECK(sym::same_up_to_factor(xp.residuals[0], p.vel("r - l")));
}

TEST_CASE("regular dynamics dissipate energy at rate R_L(E_L)") {
  auto chart = geo::make_velocity_chart({"q"}, {"gamma", "k"});
  const auto tab = chart->symbol_table();
  for (const char* L : {"v_q^2/2 - q^2/2 - gamma*s", "v_q^2/2 - k*q^4/4 - gamma*s*v_q", "exp(-gamma*s)*v_q^2/2 - q^2/2",
                        "v_q^2/2 - gamma*s^2/2"}) {
    const auto m = lag::make_model("m", chart, sym::parse(L, tab));
    const auto x = lag::lagrangian_vector_field(m).field;
    const auto r = lag::reeb_field(m);
    const Expr e = lag::energy(m);
    CHECK_MESSAGE(sym::is_zero(geo::apply(x, e) + geo::apply(r, e) * e), L);
    CHECK(same(x.c[chart->position_index(0)], chart->fiber(0)));
  }
}

TEST_CASE("model validation") {
  auto chart = geo::make_velocity_chart({"q"}, {});
  auto phase = geo::phase_chart_for(*chart);
  CHECK_THROWS_AS(lag::make_model("bad", chart, phase->fiber(0) * chart->fiber(0)), ModelError);
}
