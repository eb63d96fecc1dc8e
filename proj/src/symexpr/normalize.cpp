#include "contactk/symexpr/normalize.hpp"

#include <map>

#include "contactk/symexpr/zero_test.hpp"

namespace contactk::sym {

namespace {

bool is_parameter_atom(const Expr& atom) {
  return atom.kind() == Kind::Symbol && atom.symbol().role == SymbolRole::Parameter;
}

}  // namespace

Expr normalize(const Expr& e) {
  if (e.is_zero()) return e;
  std::vector<Term> terms = terms_of(e);

  std::map<Expr, int, ExprLess> lowest;
  for (const auto& t : terms) {
    for (const auto& f : t.factors) {
      if (is_parameter_atom(f.atom)) lowest.emplace(f.atom, 0);
    }
  }
  for (auto& [atom, low] : lowest) {
    bool first = true;
    for (const auto& t : terms) {
      int here = 0;
      for (const auto& f : t.factors) {
        if (f.atom == atom) here = f.exponent;
      }
      low = first ? here : std::min(low, here);
      first = false;
    }
  }
  Expr scaled = e;
  for (const auto& [atom, low] : lowest) {
    if (low != 0) scaled = scaled * pow(atom, -low);
  }

  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& t : terms_of(scaled)) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coefficient.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coefficient.get_den_mpz_t());
  }
  Rational content(g, l);
  content.canonicalize();
  if (leading_coefficient(scaled) < 0) content = -content;
  return scaled / Expr(content);
}

bool same_up_to_factor(const Expr& a, const Expr& b) {
  const Expr na = normalize(a);
  const Expr nb = normalize(b);
  if (na == nb) return true;
  if (is_zero(na - nb)) return true;
  return is_zero(na + nb);
}

}  // namespace contactk::sym
