#pragma once

#include <span>
#include <string>
#include <vector>

#include "contactk/symexpr/expr.hpp"

namespace contactk::sym {

/// A batch of expressions flattened into one instruction tape for fast
/// repeated double-precision evaluation. Shared subexpressions are computed
/// once per call.
class CompiledSystem {
 public:
  /// Every free symbol must appear in `variables`; throws Error otherwise.
  CompiledSystem(std::span<const Expr> outputs, std::vector<std::string> variables);

  std::size_t output_count() const { return outputs_.size(); }
  const std::vector<std::string>& variables() const { return variables_; }

  void evaluate(std::span<const double> values, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> values) const;

 private:
  enum class Op { Const, Var, Sin, Cos, Exp, Ln, Pow, Add, Mul };
  struct Instr {
    Op op;
    double constant = 0.0;
    int index = 0;  // Var: variable index; Pow: exponent
    std::vector<int> args;
  };

  std::vector<std::string> variables_;
  std::vector<Instr> tape_;
  std::vector<int> outputs_;
};

}  // namespace contactk::sym
