#pragma once

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheng/expr/expression.hpp"

namespace cheng::expr {

/// Numeric stand-in for a function atom: receives the argument values and the
/// atom's derivative multi-index.
using NumericFunction =
    std::function<double(std::span<const double> args, std::span<const int> derivative)>;

/// Numeric binding for evaluation.
class Environment {
 public:
  Environment& set(const std::string& name, double value);
  Environment& set_function(const std::string& name, NumericFunction fn);

  const std::map<std::string, double>& values() const { return values_; }
  const std::map<std::string, NumericFunction>& functions() const { return functions_; }

  /// Overlay: entries of `other` replace entries of *this.
  Environment merged(const Environment& other) const;

 private:
  std::map<std::string, double> values_;
  std::map<std::string, NumericFunction> functions_;
};

class EvaluationError : public std::runtime_error {
 public:
  enum class Reason { Domain, Unbound };
  EvaluationError(Reason reason, const std::string& what, Expr subtree)
      : std::runtime_error(what), reason_(reason), subtree_(std::move(subtree)) {}
  Reason reason() const { return reason_; }
  /// The subtree whose evaluation failed.
  const Expr& subtree() const { return subtree_; }

 private:
  Reason reason_;
  Expr subtree_;
};

/// Postfix program for repeated evaluation.  Symbols listed in `slots` are
/// read from the argument span; every other symbol and function atom is
/// resolved against the environment once, at compile time.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, std::vector<std::string> slots, const Environment& env);

  double operator()(std::span<const double> slot_values) const;
  const std::vector<std::string>& slots() const { return slots_; }

 private:
  enum class Op : std::uint8_t { Constant, Slot, Add, Mul, PowInt, PowReal, Exp, Log, Call };
  struct Instr {
    Op op;
    int index = 0;  // slot, arity, integer exponent or function id
    double value = 0.0;
    int node = 0;
  };
  void emit(const Expr& e, const Environment& env);

  std::vector<Instr> code_;
  std::vector<Expr> nodes_;
  std::vector<NumericFunction> functions_;
  std::vector<std::vector<int>> derivatives_;
  std::vector<int> call_arity_;
  std::vector<std::string> slots_;
  std::size_t max_stack_ = 0;
};

/// Recursive floating-point evaluation.  Throws EvaluationError on division
/// by zero, log of a non-positive number, overflow, or an unbound name.
double evaluate(const Expr& e, const Environment& env);

}  // namespace cheng::expr
