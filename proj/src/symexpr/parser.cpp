#include "contactk/symexpr/parser.hpp"

#include <cctype>
#include <climits>

#include "contactk/error.hpp"

namespace contactk::sym {

namespace {

constexpr std::string_view kReserved[] = {"sin", "cos", "exp", "ln"};

std::optional<Function> function_named(std::string_view name) {
  if (name == "sin") return Function::Sin;
  if (name == "cos") return Function::Cos;
  if (name == "exp") return Function::Exp;
  if (name == "ln") return Function::Ln;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& table) : text_(text), table_(table) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail({"operator", "end of input"}, "unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw SyntaxError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail({std::string("'") + c + "'"}, "");
  }

  // A product of powers kept unexpanded so that a divisor such as
  // (x*(a + b)^2) inverts factor by factor instead of as one expanded sum.
  struct Factors {
    std::vector<std::pair<Expr, int>> items;

    Expr value() const {
      Expr out(1);
      for (const auto& [base, e] : items) out *= pow(base, e);
      return out;
    }
  };

  Expr expr() { return expr_factors().value(); }

  Factors expr_factors() {
    Factors first = term_factors();
    skip_ws();
    if (pos_ >= text_.size() || (text_[pos_] != '+' && text_[pos_] != '-')) return first;
    Expr acc = first.value();
    while (true) {
      if (accept('+')) {
        acc = acc + term_factors().value();
      } else if (accept('-')) {
        acc = acc - term_factors().value();
      } else {
        return Factors{{{acc, 1}}};
      }
    }
  }

  Factors term_factors() {
    Factors acc = factor_factors();
    while (true) {
      if (accept('*')) {
        Factors f = factor_factors();
        acc.items.insert(acc.items.end(), f.items.begin(), f.items.end());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Factors f = factor_factors();
        for (auto& [base, e] : f.items) {
          if (base.is_zero()) throw SyntaxError(at, {}, "division by zero");
          e = -e;
        }
        acc.items.insert(acc.items.end(), f.items.begin(), f.items.end());
      } else {
        return acc;
      }
    }
  }

  Factors factor_factors() {
    if (accept('-')) {
      Factors f = factor_factors();
      f.items.insert(f.items.begin(), {Expr(-1), 1});
      return f;
    }
    if (accept('+')) return factor_factors();
    Factors b = base_factors();
    if (accept('^')) {
      bool negative = false;
      if (accept('-')) {
        negative = true;
      } else {
        accept('+');
      }
      skip_ws();
      const std::size_t start = pos_;
      long long n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        n = n * 10 + (text_[pos_] - '0');
        if (n > INT_MAX) throw SyntaxError(start, {}, "exponent too large");
        ++pos_;
      }
      if (pos_ == start) fail({"integer exponent"}, "");
      const int k = static_cast<int>(negative ? -n : n);
      for (auto& [base, e] : b.items) {
        if (k < 0 && base.is_zero()) throw SyntaxError(start, {}, "division by zero");
        e *= k;
      }
    }
    return b;
  }

  Expr number() {
    const std::size_t start = pos_;
    std::string digits;
    int decimals = 0;
    bool dot = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
        if (dot) ++decimals;
      } else if (c == '.' && !dot) {
        dot = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) throw SyntaxError(start, {"digit"}, "malformed number");
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(decimals));
    Rational q(num, den);
    q.canonicalize();
    return Expr(q);
  }

  Factors base_factors() {
    skip_ws();
    if (pos_ >= text_.size()) fail({"number", "identifier", "'('"}, "unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Factors{{{number(), 1}}};
    if (c == '(') {
      ++pos_;
      Factors inner = expr_factors();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string_view name = text_.substr(start, pos_ - start);
      if (auto f = function_named(name)) {
        expect('(');
        Expr arg = expr();
        expect(')');
        return Factors{{{apply(*f, arg), 1}}};
      }
      const Symbol* s = table_.find(name);
      if (s == nullptr) throw UnknownSymbol(std::string(name), start);
      return Factors{{{Expr(*s), 1}}};
    }
    fail({"number", "identifier", "'('"}, "unexpected character");
  }

  std::string_view text_;
  const SymbolTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_reserved_name(std::string_view name) {
  for (auto r : kReserved) {
    if (r == name) return true;
  }
  return false;
}

SymbolTable::SymbolTable(const std::vector<Symbol>& symbols) {
  for (const auto& s : symbols) add(s);
}

void SymbolTable::add(const Symbol& symbol) {
  if (is_reserved_name(symbol.name)) throw Error("reserved name used as symbol: " + symbol.name);
  if (!symbols_.emplace(symbol.name, symbol).second) throw Error("duplicate symbol: " + symbol.name);
}

const Symbol* SymbolTable::find(std::string_view name) const {
  auto it = symbols_.find(name);
  return it == symbols_.end() ? nullptr : &it->second;
}

std::vector<Symbol> SymbolTable::symbols() const {
  std::vector<Symbol> out;
  out.reserve(symbols_.size());
  for (const auto& [name, s] : symbols_) out.push_back(s);
  return out;
}

Expr parse(std::string_view text, const SymbolTable& table) { return Parser(text, table).run(); }

}  // namespace contactk::sym
