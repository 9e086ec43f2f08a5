#pragma once

#include <map>
#include <string>
#include <vector>

#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/expression.hpp"
#include "cheng/reduction/quadrature.hpp"
#include "cheng/symmetry/vector_field.hpp"

namespace cheng::solutions {

using expr::Expr;

enum class Form { Paper, Derived };

const char* to_string(Form form);
/// "paper" or "derived"; throws std::invalid_argument otherwise.
Form parse_form(const std::string& text);

struct Parameters {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double C0 = 1.0;
  double C1 = 0.0;
};

/// Closed-form (u, v) in t and x with the parameters substituted exactly.
struct ClosedFormSolution {
  std::string id;
  Form form = Form::Derived;
  Parameters parameters;
  Expr u;
  Expr v;
  /// Denominators; points where any is below the margin in absolute value
  /// are masked.
  std::vector<Expr> singular;
  std::string singular_locus;
  std::vector<reduction::QuadratureAtom> quadratures;
  std::vector<std::string> warnings;

  /// Parameters plus numeric stand-ins for the quadrature atoms.
  expr::Environment environment() const;
};

/// form = Paper: u = -c C0/(-exp(-c C0 ((x - t) + C1)) + a b),
///               v = c C0/(a (-1 + a b exp(c C0 ((x - t) + C1)))).
/// form = Derived: integral of w' = w (a b w + c C0)/c along f = x - c t,
///               u = -c C0/(-exp(-C0 (f + C1)) + a b), v = -w'/(a w).
/// Adds a warning when u is not a function of x - c t.
ClosedFormSolution travelling_solution(const Parameters& p, Form form);

/// h(t), g(x) concrete and nonvanishing.  X = g_a(x) - h_a(t).
/// form = Paper: u = C0 h_a'/(exp(-C0 ((x - t) + C1)) + a b),
///               v = -C0 g_a'/(a (-1 + a b exp(C0 ((x - t) + C1)))).
/// form = Derived: u = h_a' W(X), v = g_a' K(X) with
///               W = -C0/(a b - exp(-C0 (X + C1))), K = -W'/(a W).
ClosedFormSolution general_solution(const Expr& h, const Expr& g, const Parameters& p, Form form);

/// Image of the solution under exp(eps X), symbolic.  Every coefficient of
/// X must be alpha + beta * (own coordinate) with numeric alpha, beta (the
/// case group_flow handles in closed form); std::invalid_argument otherwise.
ClosedFormSolution transport_exact(const ClosedFormSolution& s, const symmetry::VectorField& vf, double eps);

/// The two residuals u_x + a u v and v_t - b u_x, symbolic, with
/// quadrature derivatives expanded.
std::pair<Expr, Expr> cheng_residuals(const ClosedFormSolution& s);

}  // namespace cheng::solutions
