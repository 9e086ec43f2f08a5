#include "cheng/odesolve/closed_forms.hpp"

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/parse.hpp"

namespace cheng::odesolve {

using expr::Expr;

ClosedForm::ClosedForm(std::string variable, Expr expression)
    : variable_(std::move(variable)),
      expression_(std::move(expression)),
      program_(expression_, {variable_}, expr::Environment{}) {}

double ClosedForm::operator()(double at) const {
  const double arg[1] = {at};
  return program_(arg);
}

namespace {

Expr bind_parameters(const Expr& e, std::initializer_list<std::pair<const char*, double>> values) {
  expr::Substitution s;
  for (const auto& [name, v] : values) s.bind(name, expr::number(expr::to_rational(v)));
  return expr::substitute(e, s);
}

}  // namespace

Expr riccati_solution_symbolic() { return expr::parse("c/((n*a*b + c*C0)*n)"); }

ClosedForm riccati_closed_form(double a, double b, double c, double C0) {
  return {"n", bind_parameters(riccati_solution_symbolic(), {{"a", a}, {"b", b}, {"c", c}, {"C0", C0}})};
}

Expr euler_solution_symbolic(EulerEquation which) {
  return which == EulerEquation::Travelling ? expr::parse("a*b/c*n^2 + C*n") : expr::parse("-a*b*r^2 + C*r");
}

ClosedForm euler_linear_closed_form(double a, double b, double c, double C, EulerEquation which) {
  const char* var = which == EulerEquation::Travelling ? "n" : "r";
  return {var, bind_parameters(euler_solution_symbolic(which), {{"a", a}, {"b", b}, {"c", c}, {"C", C}})};
}

}  // namespace cheng::odesolve
