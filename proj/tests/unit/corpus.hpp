#pragma once

// Seeded random expression corpora shared by the symexpr tests.

#include <random>
#include <string>
#include <vector>

#include "contactk/symexpr/parser.hpp"

namespace contactk::test {

inline std::vector<std::string> corpus_symbol_names() { return {"x", "y", "q", "v", "r", "theta", "m"}; }

class ExprGenerator {
 public:
  ExprGenerator(const sym::SymbolTable& table, std::uint64_t seed) : rng_(seed) {
    for (const auto& n : corpus_symbol_names()) symbols_.emplace_back(*table.find(n));
  }

  sym::Expr leaf() {
    if (rng_() % 4 == 0) return sym::rational(static_cast<long>(rng_() % 9) - 4, static_cast<long>(1 + rng_() % 3));
    return symbols_[rng_() % symbols_.size()];
  }

  sym::Expr safe_denominator() {
    const sym::Expr a = symbols_[rng_() % symbols_.size()];
    if (rng_() % 2 == 0) return a;
    return sym::pow(a, 2) + sym::rational(static_cast<long>(1 + rng_() % 3));
  }

  sym::Expr expr(int depth) {
    if (depth == 0) return leaf();
    switch (rng_() % 9) {
      case 0:
      case 1:
        return expr(depth - 1) + expr(depth - 1);
      case 2:
        return expr(depth - 1) - expr(depth - 1);
      case 3:
      case 4:
        return expr(depth - 1) * expr(depth - 1);
      case 5:
        return expr(depth - 1) / safe_denominator();
      case 6:
        return sym::pow(expr(depth - 1), 2 + static_cast<int>(rng_() % 2));
      case 7: {
        const sym::Expr a = expr(depth - 1);
        switch (rng_() % 3) {
          case 0: return sym::sin(a);
          case 1: return sym::cos(a);
          default: return sym::exp(a / sym::Expr(4));
        }
      }
      default:
        return sym::ln(sym::pow(expr(depth - 1), 2) + sym::Expr(1));
    }
  }

  std::mt19937_64& rng() { return rng_; }
  const std::vector<sym::Expr>& symbols() const { return symbols_; }

 private:
  std::mt19937_64 rng_;
  std::vector<sym::Expr> symbols_;
};

inline std::vector<sym::Expr> corpus(const sym::SymbolTable& table, int count, std::uint64_t seed) {
  ExprGenerator gen(table, seed);
  std::vector<sym::Expr> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(gen.expr(1 + i % 3));
  return out;
}

/// Expressions that are nonzero by construction: a hidden identity (not
/// visible to canonicalization) plus a small nonzero monomial.
inline std::vector<sym::Expr> nonzero_corpus(const sym::SymbolTable& table, int count) {
  ExprGenerator gen(table, 4242);
  const auto& s = gen.symbols();
  const sym::Expr x = s[0];
  const sym::Expr y = s[1];
  const sym::Expr hidden_trig = sym::sin(sym::Expr(2) * x) - sym::Expr(2) * sym::sin(x) * sym::cos(x);
  const sym::Expr hidden_exp = sym::exp(x) * sym::exp(y) - sym::exp(x + y);
  std::vector<sym::Expr> out;
  for (int i = 0; i < count; ++i) {
    sym::Expr monomial = sym::Expr(1);
    const int factors = 1 + i % 3;
    for (int k = 0; k < factors; ++k) monomial *= s[gen.rng()() % s.size()];
    const long scale = 1;
    long den = 10;
    for (int k = 0; k < i % 4; ++k) den *= 10;
    sym::Expr e = gen.expr(1 + i % 2) * hidden_trig + gen.expr(1) * hidden_exp +
                  sym::rational(scale, den) * monomial;
    out.push_back(e);
  }
  return out;
}

}  // namespace contactk::test
