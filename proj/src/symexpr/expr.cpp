#include "contactk/symexpr/expr.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "contactk/error.hpp"

namespace contactk::sym {

namespace detail {

struct Node {
  Kind kind = Kind::Constant;
  std::size_t hash = 0;
  Rational value;
  Symbol sym;
  Function func = Function::Sin;
  int exponent = 0;
  std::vector<Expr> children;
};

struct Access {
  static const Node& node(const Expr& e) { return *e.node_; }
  static Expr wrap(std::shared_ptr<const Node> n) { return Expr(std::move(n)); }
};

}  // namespace detail

using detail::Access;
using detail::Node;

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_mpz(const mpz_class& z) {
  std::size_t h = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 2);
  const std::size_t limbs = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < limbs; ++i) {
    h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i))));
  }
  return h;
}

std::size_t hash_string(std::string_view s) {
  // FNV-1a, stable across runs.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

bool shallow_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.hash != b.hash) return false;
  switch (a.kind) {
    case Kind::Constant:
      return a.value == b.value;
    case Kind::Symbol:
      return a.sym.name == b.sym.name && a.sym.role == b.sym.role && a.sym.index == b.sym.index;
    case Kind::Function:
      return a.func == b.func && a.children[0] == b.children[0];
    case Kind::Power:
      return a.exponent == b.exponent && a.children[0] == b.children[0];
    case Kind::Product:
    case Kind::Sum:
      return a.children == b.children;
  }
  return false;
}

class InternTable {
 public:
  std::shared_ptr<const Node> intern(Node&& n) {
    std::lock_guard lock(mutex_);
    auto [first, last] = table_.equal_range(n.hash);
    for (auto it = first; it != last; ++it) {
      if (auto sp = it->second.lock(); sp && shallow_equal(*sp, n)) return sp;
    }
    auto sp = std::make_shared<const Node>(std::move(n));
    table_.emplace(sp->hash, sp);
    if (table_.size() > purge_threshold_) purge();
    return sp;
  }

 private:
  void purge() {
    for (auto it = table_.begin(); it != table_.end();) {
      if (it->second.expired()) {
        it = table_.erase(it);
      } else {
        ++it;
      }
    }
    purge_threshold_ = std::max<std::size_t>(2 * table_.size(), 1U << 16);
  }

  std::mutex mutex_;
  std::unordered_multimap<std::size_t, std::weak_ptr<const Node>> table_;
  std::size_t purge_threshold_ = 1U << 16;
};

InternTable& interner() {
  static InternTable table;
  return table;
}

Expr make_constant(const Rational& q) {
  Node n;
  n.kind = Kind::Constant;
  n.value = q;
  n.value.canonicalize();
  n.hash = mix(mix(1, hash_mpz(n.value.get_num())), hash_mpz(n.value.get_den()));
  return Access::wrap(interner().intern(std::move(n)));
}

Expr make_symbol(const Symbol& s) {
  Node n;
  n.kind = Kind::Symbol;
  n.sym = s;
  n.hash = mix(2, hash_string(s.name));
  return Access::wrap(interner().intern(std::move(n)));
}

Expr make_function(Function f, const Expr& arg) {
  Node n;
  n.kind = Kind::Function;
  n.func = f;
  n.children = {arg};
  n.hash = mix(mix(3, static_cast<std::size_t>(f)), arg.hash());
  return Access::wrap(interner().intern(std::move(n)));
}

Expr make_power(const Expr& base, int exponent) {
  Node n;
  n.kind = Kind::Power;
  n.exponent = exponent;
  n.children = {base};
  n.hash = mix(mix(4, static_cast<std::size_t>(static_cast<long>(exponent) + 1000)), base.hash());
  return Access::wrap(interner().intern(std::move(n)));
}

Expr make_nary(Kind kind, std::vector<Expr> children) {
  Node n;
  n.kind = kind;
  std::size_t h = kind == Kind::Product ? 5 : 6;
  for (const auto& c : children) h = mix(h, c.hash());
  n.hash = h;
  n.children = std::move(children);
  return Access::wrap(interner().intern(std::move(n)));
}

const Expr& zero_expr() {
  static const Expr z = make_constant(Rational(0));
  return z;
}

const Expr& one_expr() {
  static const Expr o = make_constant(Rational(1));
  return o;
}

int kind_rank(Kind k) { return static_cast<int>(k); }

template <typename T>
int three_way(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Polynomial representation over atoms.

using Monomial = std::vector<PowerFactor>;

int compare_monomial(const Monomial& a, const Monomial& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i].atom, b[i].atom); c != 0) return c;
    if (a[i].exponent != b[i].exponent) return a[i].exponent > b[i].exponent ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  // Longer monomials first, so the constant term comes last.
  return a.size() > b.size() ? -1 : 1;
}

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomial(a, b) < 0; }
};

using Poly = std::map<Monomial, Rational, MonoLess>;

void add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = p.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size()) {
      out.push_back(a[i++]);
    } else if (i == a.size()) {
      out.push_back(b[j++]);
    } else {
      int c = compare(a[i].atom, b[j].atom);
      if (c < 0) {
        out.push_back(a[i++]);
      } else if (c > 0) {
        out.push_back(b[j++]);
      } else {
        int e = a[i].exponent + b[j].exponent;
        if (e != 0) out.push_back({a[i].atom, e});
        ++i;
        ++j;
      }
    }
  }
  return out;
}

Monomial mono_pow(const Monomial& m, int n) {
  Monomial out = m;
  for (auto& f : out) f.exponent *= n;
  return out;
}

Rational rational_pow(const Rational& q, int n) {
  if (n == 0) return Rational(1);
  if (q == 0) {
    if (n < 0) throw Error("division by zero in symbolic power");
    return Rational(0);
  }
  const unsigned long k = static_cast<unsigned long>(n < 0 ? -static_cast<long>(n) : n);
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), k);
  Rational r(n > 0 ? num : den, n > 0 ? den : num);
  r.canonicalize();
  return r;
}

void accumulate_term(Poly& p, const Expr& term) {
  const Node& n = Access::node(term);
  switch (n.kind) {
    case Kind::Constant:
      add_term(p, {}, n.value);
      return;
    case Kind::Symbol:
    case Kind::Function:
      add_term(p, {{term, 1}}, Rational(1));
      return;
    case Kind::Power:
      add_term(p, {{n.children[0], n.exponent}}, Rational(1));
      return;
    case Kind::Product: {
      Rational c(1);
      Monomial m;
      for (const auto& child : n.children) {
        const Node& cn = Access::node(child);
        if (cn.kind == Kind::Constant) {
          c = cn.value;
        } else if (cn.kind == Kind::Power) {
          m.push_back({cn.children[0], cn.exponent});
        } else {
          m.push_back({child, 1});
        }
      }
      add_term(p, m, c);
      return;
    }
    case Kind::Sum:
      for (const auto& child : n.children) accumulate_term(p, child);
      return;
  }
}

Poly to_poly(const Expr& e) {
  Poly p;
  accumulate_term(p, e);
  return p;
}

Expr factor_expr(const PowerFactor& f) { return f.exponent == 1 ? f.atom : make_power(f.atom, f.exponent); }

Expr term_expr(const Monomial& m, const Rational& c) {
  if (m.empty()) return make_constant(c);
  if (c == 1 && m.size() == 1) return factor_expr(m[0]);
  std::vector<Expr> children;
  children.reserve(m.size() + 1);
  if (c != 1) children.push_back(make_constant(c));
  for (const auto& f : m) children.push_back(factor_expr(f));
  return make_nary(Kind::Product, std::move(children));
}

bool is_function_atom(const Expr& atom, Function f) {
  const Node& n = Access::node(atom);
  return n.kind == Kind::Function && n.func == f;
}

Monomial adjust_exponent(const Monomial& m, const Expr& atom, int delta) {
  return mono_mul(m, Monomial{{atom, delta}});
}

// sin(u)^2 + cos(u)^2 -> 1. Whenever a term c1*M*sin(u)^k (k >= 2) meets a
// partner c2*M*sin(u)^(k-2)*cos(u)^2, the partner is folded away.
void pythagorean_pass(Poly& p) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = p.begin(); it != p.end() && !changed; ++it) {
      for (const auto& f : it->first) {
        if (f.exponent < 2 || !is_function_atom(f.atom, Function::Sin)) continue;
        const Expr& arg = Access::node(f.atom).children[0];
        const Expr cos_atom = make_function(Function::Cos, arg);
        Monomial reduced = adjust_exponent(it->first, f.atom, -2);
        Monomial partner = adjust_exponent(reduced, cos_atom, 2);
        auto pit = p.find(partner);
        if (pit == p.end()) continue;
        const Rational c1 = it->second;
        const Rational c2 = pit->second;
        const Monomial main = it->first;
        p.erase(pit);
        p.erase(main);
        add_term(p, reduced, c2);
        add_term(p, main, c1 - c2);
        changed = true;
        break;
      }
    }
  }
}

Expr from_poly(Poly p) {
  pythagorean_pass(p);
  if (p.empty()) return zero_expr();
  if (p.size() == 1) return term_expr(p.begin()->first, p.begin()->second);
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p) terms.push_back(term_expr(m, c));
  return make_nary(Kind::Sum, std::move(terms));
}

Poly poly_constant(const Rational& c) {
  Poly p;
  add_term(p, {}, c);
  return p;
}

mpz_class mpz_gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

mpz_class mpz_lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// p = content * monomial * primitive, with the primitive part's first term
// carrying a positive coefficient.
struct ContentSplit {
  Rational content;
  Monomial monomial;
  Poly primitive;
};

ContentSplit split_content(const Poly& p) {
  ContentSplit out;
  // Common monomial: minimal exponent of each atom over all terms (absent = 0).
  std::map<Expr, int, ExprLess> min_exp;
  bool first = true;
  for (const auto& [m, c] : p) {
    if (first) {
      for (const auto& f : m) min_exp[f.atom] = f.exponent;
      first = false;
      continue;
    }
    for (auto& [atom, e] : min_exp) {
      auto found = std::find_if(m.begin(), m.end(), [&](const PowerFactor& f) { return f.atom == atom; });
      int here = found == m.end() ? 0 : found->exponent;
      e = std::min(e, here);
    }
    for (const auto& f : m) {
      if (!min_exp.contains(f.atom)) min_exp[f.atom] = std::min(0, f.exponent);
    }
  }
  for (const auto& [atom, e] : min_exp) {
    if (e != 0) out.monomial.push_back({atom, e});
  }
  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& [m, c] : p) {
    g = mpz_gcd(g, c.get_num());
    l = mpz_lcm(l, c.get_den());
  }
  out.content = Rational(g, l);
  out.content.canonicalize();
  const Monomial inverse = mono_pow(out.monomial, -1);
  for (const auto& [m, c] : p) add_term(out.primitive, mono_mul(m, inverse), c / out.content);
  if (!out.primitive.empty() && out.primitive.begin()->second < 0) {
    out.content = -out.content;
    for (auto& [m, c] : out.primitive) c = -c;
  }
  return out;
}

// If every term of q carries `atom` (an inverted sum) with a negative
// exponent and p is a multiple of that sum, multiply without expanding.
std::optional<Poly> try_cancel(const Poly& p, const Poly& q) {
  if (p.size() < 2 || q.empty()) return std::nullopt;
  for (const auto& f : q.begin()->first) {
    if (f.exponent >= 0 || Access::node(f.atom).kind != Kind::Sum) continue;
    bool everywhere = true;
    for (const auto& [m, c] : q) {
      auto found = std::find_if(m.begin(), m.end(), [&](const PowerFactor& g) { return g.atom == f.atom; });
      if (found == m.end() || found->exponent >= 0) {
        everywhere = false;
        break;
      }
    }
    if (!everywhere) continue;
    ContentSplit split = split_content(p);
    Poly atom_poly = to_poly(f.atom);
    if (split.primitive.size() != atom_poly.size()) continue;
    bool same = std::equal(split.primitive.begin(), split.primitive.end(), atom_poly.begin(),
                           [](const auto& a, const auto& b) {
                             return compare_monomial(a.first, b.first) == 0 && a.second == b.second;
                           });
    if (!same) continue;
    Poly out;
    for (const auto& [m, c] : q) {
      Monomial shifted = mono_mul(adjust_exponent(m, f.atom, 1), split.monomial);
      add_term(out, shifted, c * split.content);
    }
    return out;
  }
  return std::nullopt;
}

Poly mul_poly(const Poly& p, const Poly& q) {
  if (p.empty() || q.empty()) return {};
  if (auto r = try_cancel(p, q)) return *r;
  if (auto r = try_cancel(q, p)) return *r;
  Poly out;
  for (const auto& [ma, ca] : p) {
    for (const auto& [mb, cb] : q) add_term(out, mono_mul(ma, mb), ca * cb);
  }
  return out;
}

Poly pow_poly(const Poly& p, int n) {
  if (n == 0) return poly_constant(Rational(1));
  if (p.empty()) {
    if (n < 0) throw Error("division by zero in symbolic expression");
    return {};
  }
  if (p.size() == 1) {
    const auto& [m, c] = *p.begin();
    Poly out;
    add_term(out, mono_pow(m, n), rational_pow(c, n));
    return out;
  }
  if (n > 0) {
    Poly result = poly_constant(Rational(1));
    Poly base = p;
    int k = n;
    while (k > 0) {
      if (k & 1) result = mul_poly(result, base);
      k >>= 1;
      if (k > 0) base = mul_poly(base, base);
    }
    return result;
  }
  ContentSplit split = split_content(p);
  if (split.primitive.size() == 1) {
    Poly single;
    add_term(single, mono_mul(split.primitive.begin()->first, split.monomial),
             split.primitive.begin()->second * split.content);
    return pow_poly(single, n);
  }
  Expr atom = from_poly(split.primitive);
  Monomial m = mono_mul(mono_pow(split.monomial, n), Monomial{{atom, n}});
  Poly out;
  add_term(out, m, rational_pow(split.content, n));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(SymbolRole role) {
  switch (role) {
    case SymbolRole::Position: return "position";
    case SymbolRole::Velocity: return "velocity";
    case SymbolRole::Momentum: return "momentum";
    case SymbolRole::Action: return "action";
    case SymbolRole::Parameter: return "parameter";
    case SymbolRole::Multiplier: return "multiplier";
    case SymbolRole::FreeFunction: return "free-function";
    case SymbolRole::Auxiliary: return "auxiliary";
  }
  return "auxiliary";
}

std::string_view to_string(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
  }
  return "?";
}

Expr::Expr() : Expr(zero_expr()) {}
Expr::Expr(int value) : Expr(make_constant(Rational(value))) {}
Expr::Expr(long value) : Expr(make_constant(Rational(value))) {}
Expr::Expr(const Rational& value) : Expr(make_constant(value)) {}
Expr::Expr(const Symbol& symbol) : Expr(make_symbol(symbol)) {}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return node_->kind == Kind::Constant && node_->value == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Constant && node_->value == 1; }
const Rational& Expr::value() const { return node_->value; }
const Symbol& Expr::symbol() const { return node_->sym; }
Function Expr::function() const { return node_->func; }
int Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::size_t Expr::hash() const { return node_->hash; }

int compare(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return 0;
  const Node& na = Access::node(a);
  const Node& nb = Access::node(b);
  if (na.kind != nb.kind) return kind_rank(na.kind) < kind_rank(nb.kind) ? -1 : 1;
  switch (na.kind) {
    case Kind::Constant:
      return cmp(na.value, nb.value) < 0 ? -1 : (cmp(na.value, nb.value) > 0 ? 1 : 0);
    case Kind::Symbol:
      if (int c = na.sym.name.compare(nb.sym.name); c != 0) return c < 0 ? -1 : 1;
      if (int c = three_way(static_cast<int>(na.sym.role), static_cast<int>(nb.sym.role)); c != 0) return c;
      return three_way(na.sym.index.value_or(-1), nb.sym.index.value_or(-1));
    case Kind::Function:
      if (na.func != nb.func) return static_cast<int>(na.func) < static_cast<int>(nb.func) ? -1 : 1;
      return compare(na.children[0], nb.children[0]);
    case Kind::Power:
      if (int c = compare(na.children[0], nb.children[0]); c != 0) return c;
      return three_way(na.exponent, nb.exponent);
    case Kind::Product:
    case Kind::Sum: {
      const std::size_t n = std::min(na.children.size(), nb.children.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(na.children[i], nb.children[i]); c != 0) return c;
      }
      return three_way(na.children.size(), nb.children.size());
    }
  }
  return 0;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  Poly p = to_poly(a);
  accumulate_term(p, b);
  return from_poly(std::move(p));
}

Expr operator-(const Expr& a) {
  if (a.is_zero()) return a;
  Poly p = to_poly(a);
  for (auto& [m, c] : p) c = -c;
  return from_poly(std::move(p));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return zero_expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return from_poly(mul_poly(to_poly(a), to_poly(b)));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw Error("division by zero in symbolic expression");
  if (a == b) return one_expr();
  if (b.is_one()) return a;
  if (a.is_zero()) return a;
  return from_poly(mul_poly(to_poly(a), pow_poly(to_poly(b), -1)));
}

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr pow(const Expr& base, int exponent) {
  if (exponent == 1) return base;
  return from_poly(pow_poly(to_poly(base), exponent));
}

Rational leading_coefficient(const Expr& e) {
  Poly p = to_poly(e);
  if (p.empty()) return Rational(0);
  return p.begin()->second;
}

Expr apply(Function f, const Expr& arg) {
  const Node& an = Access::node(arg);
  switch (f) {
    case Function::Sin:
      if (arg.is_zero()) return zero_expr();
      if (leading_coefficient(arg) < 0) return -make_function(Function::Sin, -arg);
      break;
    case Function::Cos:
      if (arg.is_zero()) return one_expr();
      if (leading_coefficient(arg) < 0) return make_function(Function::Cos, -arg);
      break;
    case Function::Exp:
      if (arg.is_zero()) return one_expr();
      if (an.kind == Kind::Function && an.func == Function::Ln) return an.children[0];
      break;
    case Function::Ln:
      if (arg.is_one()) return zero_expr();
      if (an.kind == Kind::Function && an.func == Function::Exp) return an.children[0];
      break;
  }
  return make_function(f, arg);
}

Expr rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return make_constant(q);
}

Expr sum(std::span<const Expr> terms) {
  Poly p;
  for (const auto& t : terms) accumulate_term(p, t);
  return from_poly(std::move(p));
}

Expr product(std::span<const Expr> factors) {
  Poly p = poly_constant(Rational(1));
  for (const auto& f : factors) {
    if (f.is_zero()) return zero_expr();
    p = mul_poly(p, to_poly(f));
  }
  return from_poly(std::move(p));
}

namespace {

template <typename Leaf>
Expr rebuild(const Expr& e, const Leaf& leaf, std::unordered_map<const void*, Expr>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  const Node& n = Access::node(e);
  Expr out;
  switch (n.kind) {
    case Kind::Constant:
      out = make_constant(n.value);
      break;
    case Kind::Symbol:
      out = leaf(e);
      break;
    case Kind::Function:
      out = apply(n.func, rebuild(n.children[0], leaf, memo));
      break;
    case Kind::Power:
      out = pow(rebuild(n.children[0], leaf, memo), n.exponent);
      break;
    case Kind::Product: {
      std::vector<Expr> cs;
      cs.reserve(n.children.size());
      for (const auto& c : n.children) cs.push_back(rebuild(c, leaf, memo));
      out = product(cs);
      break;
    }
    case Kind::Sum: {
      std::vector<Expr> cs;
      cs.reserve(n.children.size());
      for (const auto& c : n.children) cs.push_back(rebuild(c, leaf, memo));
      out = sum(cs);
      break;
    }
  }
  memo.emplace(e.id(), out);
  return out;
}

}  // namespace

Expr canonicalize(const Expr& e) {
  std::unordered_map<const void*, Expr> memo;
  return rebuild(e, [](const Expr& s) { return make_symbol(s.symbol()); }, memo);
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  std::unordered_map<const void*, Expr> memo;
  return rebuild(
      e,
      [&](const Expr& s) {
        auto it = bindings.find(s.symbol().name);
        return it == bindings.end() ? s : it->second;
      },
      memo);
}

Expr diff(const Expr& e, const Symbol& x) {
  std::unordered_map<const void*, Expr> memo;
  std::function<Expr(const Expr&)> rec = [&](const Expr& u) -> Expr {
    if (auto it = memo.find(u.id()); it != memo.end()) return it->second;
    const Node& n = Access::node(u);
    Expr out;
    switch (n.kind) {
      case Kind::Constant:
        out = zero_expr();
        break;
      case Kind::Symbol:
        out = n.sym.name == x.name ? one_expr() : zero_expr();
        break;
      case Kind::Function: {
        const Expr& arg = n.children[0];
        Expr darg = rec(arg);
        if (darg.is_zero()) {
          out = zero_expr();
          break;
        }
        switch (n.func) {
          case Function::Sin: out = apply(Function::Cos, arg) * darg; break;
          case Function::Cos: out = -(apply(Function::Sin, arg) * darg); break;
          case Function::Exp: out = u * darg; break;
          case Function::Ln: out = darg / arg; break;
        }
        break;
      }
      case Kind::Power: {
        const Expr& base = n.children[0];
        Expr db = rec(base);
        out = db.is_zero() ? zero_expr() : Expr(n.exponent) * pow(base, n.exponent - 1) * db;
        break;
      }
      case Kind::Product: {
        std::vector<Expr> parts;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          Expr di = rec(n.children[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> factors;
          factors.reserve(n.children.size());
          for (std::size_t j = 0; j < n.children.size(); ++j) {
            factors.push_back(j == i ? di : n.children[j]);
          }
          parts.push_back(product(factors));
        }
        out = sum(parts);
        break;
      }
      case Kind::Sum: {
        std::vector<Expr> parts;
        parts.reserve(n.children.size());
        for (const auto& c : n.children) parts.push_back(rec(c));
        out = sum(parts);
        break;
      }
    }
    memo.emplace(u.id(), out);
    return out;
  };
  return rec(e);
}

std::vector<Symbol> free_symbols(const Expr& e) {
  std::map<std::string, Symbol> found;
  std::unordered_set<const void*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr u = stack.back();
    stack.pop_back();
    if (!seen.insert(u.id()).second) continue;
    const Node& n = Access::node(u);
    if (n.kind == Kind::Symbol) found.emplace(n.sym.name, n.sym);
    for (const auto& c : n.children) stack.push_back(c);
  }
  std::vector<Symbol> out;
  out.reserve(found.size());
  for (auto& [name, s] : found) out.push_back(s);
  return out;
}

bool depends_on(const Expr& e, std::string_view name) {
  std::unordered_set<const void*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr u = stack.back();
    stack.pop_back();
    if (!seen.insert(u.id()).second) continue;
    const Node& n = Access::node(u);
    if (n.kind == Kind::Symbol && n.sym.name == name) return true;
    for (const auto& c : n.children) stack.push_back(c);
  }
  return false;
}

std::size_t node_count(const Expr& e) {
  std::size_t total = 1;
  for (const auto& c : e.children()) total += node_count(c);
  return total;
}

std::vector<Term> terms_of(const Expr& e) {
  std::vector<Term> out;
  for (auto& [m, c] : to_poly(e)) out.push_back(Term{c, m});
  return out;
}

Expr from_terms(std::span<const Term> terms) {
  Poly p;
  for (const auto& t : terms) {
    Poly tp = poly_constant(t.coefficient);
    for (const auto& f : t.factors) tp = mul_poly(tp, pow_poly(to_poly(f.atom), f.exponent));
    for (const auto& [m, c] : tp) add_term(p, m, c);
  }
  return from_poly(std::move(p));
}

// ---------------------------------------------------------------------------
// Printing. Output re-parses to the same canonical expression.

namespace {

void print_expr(std::ostream& os, const Expr& e);

void print_atom(std::ostream& os, const Expr& atom) {
  const Node& n = Access::node(atom);
  switch (n.kind) {
    case Kind::Symbol:
      os << n.sym.name;
      return;
    case Kind::Function:
      os << to_string(n.func) << '(';
      print_expr(os, n.children[0]);
      os << ')';
      return;
    default:
      os << '(';
      print_expr(os, atom);
      os << ')';
      return;
  }
}

void print_factor(std::ostream& os, const Expr& atom, int exponent) {
  print_atom(os, atom);
  if (exponent != 1) os << '^' << exponent;
}

void print_term_magnitude(std::ostream& os, const Rational& magnitude, const Monomial& m) {
  std::vector<const PowerFactor*> num;
  std::vector<const PowerFactor*> den;
  for (const auto& f : m) (f.exponent > 0 ? num : den).push_back(&f);
  const mpz_class& n = magnitude.get_num();
  const mpz_class& d = magnitude.get_den();
  bool wrote = false;
  if (n != 1 || num.empty()) {
    os << n.get_str();
    wrote = true;
  }
  for (const auto* f : num) {
    if (wrote) os << '*';
    print_factor(os, f->atom, f->exponent);
    wrote = true;
  }
  const std::size_t den_parts = den.size() + (d != 1 ? 1 : 0);
  if (den_parts == 0) return;
  os << '/';
  if (den_parts > 1) os << '(';
  bool first = true;
  if (d != 1) {
    os << d.get_str();
    first = false;
  }
  for (const auto* f : den) {
    if (!first) os << '*';
    print_factor(os, f->atom, -f->exponent);
    first = false;
  }
  if (den_parts > 1) os << ')';
}

void print_expr(std::ostream& os, const Expr& e) {
  Poly p = to_poly(e);
  if (p.empty()) {
    os << '0';
    return;
  }
  bool first = true;
  for (const auto& [m, c] : p) {
    const bool negative = c < 0;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    print_term_magnitude(os, negative ? Rational(-c) : c, m);
    first = false;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
  print_expr(os, e);
  return os;
}

}  // namespace contactk::sym
