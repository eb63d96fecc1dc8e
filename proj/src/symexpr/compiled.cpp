#include "contactk/symexpr/compiled.hpp"

#include <cmath>
#include <unordered_map>

#include "contactk/error.hpp"

namespace contactk::sym {

CompiledSystem::CompiledSystem(std::span<const Expr> outputs, std::vector<std::string> variables)
    : variables_(std::move(variables)) {
  std::unordered_map<std::string, int> var_index;
  for (std::size_t i = 0; i < variables_.size(); ++i) var_index.emplace(variables_[i], static_cast<int>(i));
  std::unordered_map<const void*, int> slot_of;

  auto emit = [&](auto&& self, const Expr& e) -> int {
    if (auto it = slot_of.find(e.id()); it != slot_of.end()) return it->second;
    Instr in{};
    switch (e.kind()) {
      case Kind::Constant:
        in.op = Op::Const;
        in.constant = e.value().get_d();
        break;
      case Kind::Symbol: {
        auto it = var_index.find(e.symbol().name);
        if (it == var_index.end()) throw Error("unbound symbol in numeric evaluation: " + e.symbol().name);
        in.op = Op::Var;
        in.index = it->second;
        break;
      }
      case Kind::Function:
        switch (e.function()) {
          case Function::Sin: in.op = Op::Sin; break;
          case Function::Cos: in.op = Op::Cos; break;
          case Function::Exp: in.op = Op::Exp; break;
          case Function::Ln: in.op = Op::Ln; break;
        }
        in.args = {self(self, e.children()[0])};
        break;
      case Kind::Power:
        in.op = Op::Pow;
        in.index = e.exponent();
        in.args = {self(self, e.children()[0])};
        break;
      case Kind::Product:
      case Kind::Sum:
        in.op = e.kind() == Kind::Sum ? Op::Add : Op::Mul;
        for (const auto& c : e.children()) in.args.push_back(self(self, c));
        break;
    }
    tape_.push_back(std::move(in));
    const int slot = static_cast<int>(tape_.size()) - 1;
    slot_of.emplace(e.id(), slot);
    return slot;
  };

  for (const auto& e : outputs) outputs_.push_back(emit(emit, e));
}

void CompiledSystem::evaluate(std::span<const double> values, std::span<double> out) const {
  std::vector<double> slots(tape_.size());
  for (std::size_t i = 0; i < tape_.size(); ++i) {
    const Instr& in = tape_[i];
    double v = 0.0;
    switch (in.op) {
      case Op::Const: v = in.constant; break;
      case Op::Var: v = values[static_cast<std::size_t>(in.index)]; break;
      case Op::Sin: v = std::sin(slots[in.args[0]]); break;
      case Op::Cos: v = std::cos(slots[in.args[0]]); break;
      case Op::Exp: v = std::exp(slots[in.args[0]]); break;
      case Op::Ln: v = std::log(slots[in.args[0]]); break;
      case Op::Pow: {
        const double base = slots[in.args[0]];
        int n = in.index;
        const bool invert = n < 0;
        if (invert) n = -n;
        double r = 1.0;
        double x = base;
        while (n > 0) {
          if (n & 1) r *= x;
          x *= x;
          n >>= 1;
        }
        v = invert ? 1.0 / r : r;
        break;
      }
      case Op::Add:
        for (int a : in.args) v += slots[a];
        break;
      case Op::Mul:
        v = 1.0;
        for (int a : in.args) v *= slots[a];
        break;
    }
    slots[i] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = slots[outputs_[k]];
}

std::vector<double> CompiledSystem::evaluate(std::span<const double> values) const {
  std::vector<double> out(outputs_.size());
  evaluate(values, out);
  return out;
}

}  // namespace contactk::sym
