#include "cheng/expr/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace cheng::expr {

Environment& Environment::set(const std::string& name, double value) {
  values_[name] = value;
  return *this;
}

Environment& Environment::set_function(const std::string& name, NumericFunction fn) {
  functions_[name] = std::move(fn);
  return *this;
}

Environment Environment::merged(const Environment& other) const {
  Environment out = *this;
  for (const auto& [k, v] : other.values_) out.values_[k] = v;
  for (const auto& [k, f] : other.functions_) out.functions_[k] = f;
  return out;
}

CompiledExpr::CompiledExpr(const Expr& e, std::vector<std::string> slots, const Environment& env)
    : slots_(std::move(slots)) {
  emit(e, env);
  std::size_t depth = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Constant:
      case Op::Slot:
        ++depth;
        break;
      case Op::Add:
      case Op::Mul:
        depth -= static_cast<std::size_t>(in.index) - 1;
        break;
      case Op::Call:
        depth -= static_cast<std::size_t>(call_arity_[static_cast<std::size_t>(in.index)]);
        ++depth;
        break;
      default:
        break;
    }
    max_stack_ = std::max(max_stack_, depth);
  }
}

void CompiledExpr::emit(const Expr& e, const Environment& env) {
  const int node = static_cast<int>(nodes_.size());
  nodes_.push_back(e);
  switch (e.kind()) {
    case Kind::Number:
      code_.push_back({Op::Constant, 0, to_double(e.value()), node});
      return;
    case Kind::Symbol: {
      auto it = std::find(slots_.begin(), slots_.end(), e.name());
      if (it != slots_.end()) {
        code_.push_back({Op::Slot, static_cast<int>(it - slots_.begin()), 0.0, node});
        return;
      }
      auto v = env.values().find(e.name());
      if (v == env.values().end()) {
        throw EvaluationError(EvaluationError::Reason::Unbound,
                              "unbound symbol '" + e.name() + "'", e);
      }
      code_.push_back({Op::Constant, 0, v->second, node});
      return;
    }
    case Kind::Sum:
    case Kind::Product:
      for (const auto& c : e.children()) emit(c, env);
      code_.push_back({e.kind() == Kind::Sum ? Op::Add : Op::Mul,
                       static_cast<int>(e.children().size()), 0.0, node});
      return;
    case Kind::Power: {
      emit(e.base(), env);
      if (denominator(e.value()) == 1 && abs(numerator(e.value())) < 1024) {
        code_.push_back({Op::PowInt, numerator(e.value()).convert_to<int>(), 0.0, node});
      } else {
        code_.push_back({Op::PowReal, 0, to_double(e.value()), node});
      }
      return;
    }
    case Kind::Exp:
      emit(e.argument(), env);
      code_.push_back({Op::Exp, 0, 0.0, node});
      return;
    case Kind::Log:
      emit(e.argument(), env);
      code_.push_back({Op::Log, 0, 0.0, node});
      return;
    case Kind::Function: {
      auto f = env.functions().find(e.name());
      if (f == env.functions().end()) {
        throw EvaluationError(EvaluationError::Reason::Unbound,
                              "unbound function '" + e.name() + "'", e);
      }
      for (const auto& c : e.children()) emit(c, env);
      const int id = static_cast<int>(functions_.size());
      functions_.push_back(f->second);
      derivatives_.emplace_back(e.derivative().begin(), e.derivative().end());
      call_arity_.push_back(static_cast<int>(e.children().size()));
      code_.push_back({Op::Call, id, 0.0, node});
      return;
    }
  }
}

double CompiledExpr::operator()(std::span<const double> slot_values) const {
  std::vector<double> stack;
  stack.reserve(max_stack_ + 1);
  auto fail = [&](const Instr& in, const std::string& why) {
    throw EvaluationError(EvaluationError::Reason::Domain, why, nodes_[static_cast<std::size_t>(in.node)]);
  };
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Constant:
        stack.push_back(in.value);
        break;
      case Op::Slot:
        stack.push_back(slot_values[static_cast<std::size_t>(in.index)]);
        break;
      case Op::Add: {
        double acc = 0.0;
        for (int i = 0; i < in.index; ++i) {
          acc += stack.back();
          stack.pop_back();
        }
        stack.push_back(acc);
        break;
      }
      case Op::Mul: {
        double acc = 1.0;
        for (int i = 0; i < in.index; ++i) {
          acc *= stack.back();
          stack.pop_back();
        }
        stack.push_back(acc);
        break;
      }
      case Op::PowInt: {
        double b = stack.back();
        if (b == 0.0 && in.index < 0) fail(in, "division by zero");
        stack.back() = std::pow(b, in.index);
        break;
      }
      case Op::PowReal: {
        double b = stack.back();
        if (b < 0.0) fail(in, "fractional power of a negative number");
        if (b == 0.0 && in.value < 0.0) fail(in, "division by zero");
        stack.back() = std::pow(b, in.value);
        break;
      }
      case Op::Exp:
        stack.back() = std::exp(stack.back());
        break;
      case Op::Log:
        if (!(stack.back() > 0.0)) fail(in, "logarithm of a non-positive number");
        stack.back() = std::log(stack.back());
        break;
      case Op::Call: {
        const auto id = static_cast<std::size_t>(in.index);
        const auto arity = static_cast<std::size_t>(call_arity_[id]);
        std::span<const double> args(stack.data() + stack.size() - arity, arity);
        double r = functions_[id](args, derivatives_[id]);
        stack.resize(stack.size() - arity);
        stack.push_back(r);
        break;
      }
    }
    if (!std::isfinite(stack.back())) fail(in, "non-finite intermediate value");
  }
  return stack.back();
}

double evaluate(const Expr& e, const Environment& env) {
  return CompiledExpr(e, {}, env)(std::span<const double>{});
}

}  // namespace cheng::expr
