#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/expression.hpp"

namespace cheng::reduction {

using expr::Expr;

class QuadratureDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Antiderivative atom A = name(variable) with A' = integrand, normalized
/// so that A(1) = 1.  Stays symbolic; derivatives of the atom are replaced
/// by derivatives of the integrand, values come from adaptive quadrature.
struct QuadratureAtom {
  std::string name;
  std::string variable;
  Expr integrand;  // in `variable`

  /// Integrand evaluable: no arbitrary functions, every symbol other than
  /// the variable bound in `env`.
  bool numeric(const expr::Environment& env = {}) const;
  /// 1 + integral_1^at integrand, Gauss-Kronrod, absolute tolerance 1e-10.
  /// Throws QuadratureDomainError if the integrand cannot be evaluated.
  double value(double at, const expr::Environment& env = {}) const;
  /// Numeric stand-in for the atom, derivatives included.
  expr::NumericFunction function(const expr::Environment& env = {}) const;
};

inline constexpr double kQuadratureTolerance = 1e-10;

/// Replaces every differentiated occurrence of a quadrature atom by the
/// corresponding derivative of its integrand.
Expr expand_quadrature_derivatives(const Expr& e, const std::vector<QuadratureAtom>& atoms);

/// Environment with a numeric function for every atom whose integrand is
/// concrete.
expr::Environment quadrature_environment(const std::vector<QuadratureAtom>& atoms,
                                         const expr::Environment& env = {});

}  // namespace cheng::reduction
