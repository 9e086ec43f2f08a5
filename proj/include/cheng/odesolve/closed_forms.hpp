#pragma once

#include <string>

#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/expression.hpp"

namespace cheng::odesolve {

/// A one-variable closed-form solution, usable both symbolically and as a
/// callable.  Calling at a root of a denominator throws expr::EvaluationError.
class ClosedForm {
 public:
  ClosedForm(std::string variable, expr::Expr expression);

  const std::string& variable() const { return variable_; }
  const expr::Expr& expression() const { return expression_; }
  double operator()(double at) const;

 private:
  std::string variable_;
  expr::Expr expression_;
  expr::CompiledExpr program_;
};

/// m(n) = c / ((a b n + c C0) n), the solution of the Riccati reduction
/// m' = -a b n m^2 / c - m / n.
expr::Expr riccati_solution_symbolic();  // in n, a, b, c, C0
ClosedForm riccati_closed_form(double a, double b, double c, double C0);

enum class EulerEquation {
  Travelling,  // m' = a b n / c + m / n      ->  m = (a b / c) n^2 + C n
  Scaling,     // v' = -a b r + v / r         ->  v = -a b r^2 + C r
};

expr::Expr euler_solution_symbolic(EulerEquation which);  // in n or r, a, b, c, C
ClosedForm euler_linear_closed_form(double a, double b, double c, double C, EulerEquation which);

}  // namespace cheng::odesolve
