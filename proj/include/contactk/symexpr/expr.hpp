#pragma once

// Immutable symbolic expressions with exact rational constants.
//
// Every Expr handed out by this header is in canonical form: sums and
// products are flattened, like terms are merged, positive integer powers of
// sums are expanded, and nodes are interned so that structurally identical
// subtrees share one allocation. Equality is therefore pointer equality.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace contactk::sym {

using Rational = mpq_class;

enum class SymbolRole : std::uint8_t {
  Position,
  Velocity,
  Momentum,
  Action,
  Parameter,
  Multiplier,
  FreeFunction,
  Auxiliary,
};

std::string_view to_string(SymbolRole role);

struct Symbol {
  std::string name;
  SymbolRole role = SymbolRole::Auxiliary;
  std::optional<int> index;

  Symbol() = default;
  Symbol(std::string n, SymbolRole r = SymbolRole::Auxiliary, std::optional<int> i = std::nullopt)
      : name(std::move(n)), role(r), index(i) {}

  // Names are unique within a chart, so identity is the name.
  friend bool operator==(const Symbol& a, const Symbol& b) { return a.name == b.name; }
  friend bool operator<(const Symbol& a, const Symbol& b) { return a.name < b.name; }
};

enum class Kind : std::uint8_t { Constant, Symbol, Function, Power, Product, Sum };
enum class Function : std::uint8_t { Sin, Cos, Exp, Ln };

std::string_view to_string(Function f);

namespace detail {
struct Node;
struct Access;
}

class Expr {
 public:
  Expr();  // the constant 0
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  explicit Expr(const Rational& value);
  explicit Expr(const Symbol& symbol);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero() const;  // canonically the constant 0
  bool is_one() const;

  const Rational& value() const;        // Constant
  const Symbol& symbol() const;         // Symbol
  Function function() const;            // Function
  int exponent() const;                 // Power
  std::span<const Expr> children() const;  // Function: {arg}; Power: {base}; Product/Sum: operands

  std::size_t hash() const;
  const void* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return a.node_ != b.node_; }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;

  friend struct detail::Access;
};

/// Total order on canonical expressions. Used for sorting operands and for
/// the deterministic ordering of terms.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr pow(const Expr& base, int exponent);
Expr apply(Function f, const Expr& arg);
inline Expr sin(const Expr& e) { return apply(Function::Sin, e); }
inline Expr cos(const Expr& e) { return apply(Function::Cos, e); }
inline Expr exp(const Expr& e) { return apply(Function::Exp, e); }
inline Expr ln(const Expr& e) { return apply(Function::Ln, e); }

Expr rational(long num, long den = 1);

/// Sum/product of many operands in one canonicalization pass.
Expr sum(std::span<const Expr> terms);
Expr product(std::span<const Expr> factors);

/// Rebuilds `e` bottom-up through the canonical constructors.
Expr canonicalize(const Expr& e);

Expr diff(const Expr& e, const Symbol& x);

/// Keyed by symbol name.
using Bindings = std::map<std::string, Expr, std::less<>>;

/// Simultaneous substitution followed by canonicalization.
Expr substitute(const Expr& e, const Bindings& bindings);

std::vector<Symbol> free_symbols(const Expr& e);
bool depends_on(const Expr& e, std::string_view name);
std::size_t node_count(const Expr& e);

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// Polynomial view: an expression as a sum of rational multiples of
// monomials over atoms (symbols, function applications, inverted sums).
struct PowerFactor {
  Expr atom;
  int exponent = 1;
};

struct Term {
  Rational coefficient;
  std::vector<PowerFactor> factors;
};

std::vector<Term> terms_of(const Expr& e);
Expr from_terms(std::span<const Term> terms);

/// Coefficient of the leading term (first term in canonical order);
/// 0 for the zero expression.
Rational leading_coefficient(const Expr& e);

}  // namespace contactk::sym
