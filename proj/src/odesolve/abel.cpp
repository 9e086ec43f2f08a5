#include "cheng/odesolve/abel.hpp"

#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/parse.hpp"

namespace cheng::odesolve {

using expr::Expr;

AbelKind kind_of(AbelEquation which) {
  switch (which) {
    case AbelEquation::TravellingCanonical:
    case AbelEquation::ScalingCanonical:
      return AbelKind::First;
    default:
      return AbelKind::Second;
  }
}

const char* independent_name(AbelEquation which) {
  return which == AbelEquation::TravellingCanonical || which == AbelEquation::TravellingInvariant ? "n" : "r";
}

const char* dependent_name(AbelEquation which) {
  return which == AbelEquation::TravellingCanonical || which == AbelEquation::TravellingInvariant ? "m" : "v";
}

Expr abel_rhs(AbelEquation which, EquationForm form) {
  switch (which) {
    case AbelEquation::TravellingCanonical:
      return expr::parse("(n^3*a*b + c*n^2)*m^3/(c*n) + (-n^2*a*b - c*n)*m^2/(c*n) - m/n");
    case AbelEquation::TravellingInvariant:
      return form == EquationForm::AsPrinted ? expr::parse("m*(n^2*a*b + m + 2*c*n)/(c*n*(m + n))")
                                             : expr::parse("m*(n^2*a*b + c*m + 2*c*n)/(c*n*(m + n))");
    case AbelEquation::ScalingCanonical:
      return expr::parse("-(a*b*r^3 - r^2)*v^3/r - (-a*b*r^2 + r)*v^2/r - v/r");
    case AbelEquation::ScalingInvariant:
      return expr::parse("v/r - r*a*b + 1 + (a*b*r^2 - r)/v");
  }
  return {};
}

Expr abel_denominator(AbelEquation which) {
  switch (which) {
    case AbelEquation::TravellingInvariant: return expr::parse("m + n");
    case AbelEquation::ScalingInvariant: return expr::symbol("v");
    default: return 1;
  }
}

Trajectory abel_solve_numeric(AbelEquation which, const AbelParameters& p, double x0, double y0,
                              double x1, const IntegratorOptions& options, EquationForm form) {
  expr::Environment env;
  env.set("a", p.a).set("b", p.b).set("c", p.c);
  const std::vector<std::string> slots{independent_name(which), dependent_name(which)};
  const expr::CompiledExpr rhs(abel_rhs(which, form), slots, env);
  System f = [&rhs](double x, std::span<const double> y, std::span<double> dy) {
    const double args[2] = {x, y[0]};
    try {
      dy[0] = rhs(args);
    } catch (const expr::EvaluationError&) {
      dy[0] = std::numeric_limits<double>::quiet_NaN();
    }
  };
  IntegratorOptions opts = options;
  if (kind_of(which) == AbelKind::Second && !opts.monitor) {
    const expr::CompiledExpr den(abel_denominator(which), slots, env);
    opts.monitor = [den](double x, std::span<const double> y) {
      const double args[2] = {x, y[0]};
      return den(args);
    };
  }
  return integrate(f, x0, {y0}, x1, opts);
}

}  // namespace cheng::odesolve
