#pragma once

#include <string>

#include "cheng/expr/expression.hpp"

namespace cheng::expr {

/// Rational-function normal form.
///
/// Expands into a numerator polynomial over "kernels" (symbols, function
/// atoms, log(.) and fractional powers) with exact rational coefficients,
/// over a denominator kept as a product of primitive polynomial factors.
/// Products of exponentials are merged into a single exp(.) per monomial.
/// Denominator factors that divide the numerator exactly are cancelled.
/// normalize(normalize(e)) == normalize(e).
Expr normalize(const Expr& e);

struct Fraction {
  Expr numerator;    // polynomial: no negative kernel powers
  Expr denominator;  // expanded polynomial
};

/// numerator / denominator == e, both expanded polynomials in the kernels.
Fraction as_fraction(const Expr& e);

struct DegreeInfo {
  int numerator_min = 0;
  int numerator_max = 0;
  int denominator_max = 0;
  /// The symbol occurs inside a kernel (log, exp, function argument, ...).
  bool non_polynomial = false;
};

/// Degrees of `symbol` in the numerator and denominator of as_fraction(e).
DegreeInfo degree_in(const Expr& e, const std::string& symbol);

}  // namespace cheng::expr
