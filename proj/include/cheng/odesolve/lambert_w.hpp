#pragma once

#include <stdexcept>

namespace cheng::odesolve {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Real branches of the Lambert W function, W(x) e^W(x) = x.
/// Branch 0 on [-1/e, inf), branch -1 on [-1/e, 0).  Halley iteration from
/// a branch-point series or asymptotic start, at most 50 iterations, to
/// |W e^W - x| <= 1e-12 max(1, |x|).
double lambert_w(double x, int branch = 0);

}  // namespace cheng::odesolve
