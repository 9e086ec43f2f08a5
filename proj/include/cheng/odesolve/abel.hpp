#pragma once

#include "cheng/expr/expression.hpp"
#include "cheng/odesolve/integrate.hpp"

namespace cheng::odesolve {

/// First-order Abel equations obtained from the travelling-wave and scaling
/// second-order equations.
enum class AbelEquation {
  TravellingCanonical,  // first kind,  m(n)
  TravellingInvariant,  // second kind, m(n), denominator m + n
  ScalingCanonical,     // first kind,  v(r)
  ScalingInvariant,     // second kind, v(r), denominator v
};

enum class AbelKind { First, Second };

/// As printed in the source, or as re-derived from the second-order
/// equation.  They differ only for TravellingInvariant when c != 1.
enum class EquationForm { AsPrinted, Derived };

AbelKind kind_of(AbelEquation which);
const char* independent_name(AbelEquation which);  // "n" or "r"
const char* dependent_name(AbelEquation which);    // "m" or "v"

/// Right-hand side y' = F(x, y) in the symbols (x, y, a, b, c), with the
/// dependent variable as a plain symbol.
expr::Expr abel_rhs(AbelEquation which, EquationForm form = EquationForm::Derived);
/// The denominator that must not vanish (second kind), or 1.
expr::Expr abel_denominator(AbelEquation which);

struct AbelParameters {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

/// Integrates the selected equation from (x0, y0) to x1.  Second-kind
/// equations stop with Status::SingularStop before their denominator
/// changes sign.
Trajectory abel_solve_numeric(AbelEquation which, const AbelParameters& p, double x0, double y0,
                              double x1, const IntegratorOptions& options = {},
                              EquationForm form = EquationForm::Derived);

}  // namespace cheng::odesolve
