#include "cheng/odesolve/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cheng::odesolve {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr int kMaxIterations = 50;

// Series about the branch point in p = +-sqrt(2(e x + 1)).
double branch_point_guess(double x, double sign) {
  const double p = sign * std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
  return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

double initial_guess(double x, int branch) {
  if (branch == 0) {
    if (x < -0.32) return branch_point_guess(x, 1.0);
    if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
  }
  if (x < -0.25) return branch_point_guess(x, -1.0);
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w(double x, int branch) {
  if (branch != 0 && branch != -1) throw DomainError("lambert_w: branch must be 0 or -1");
  if (!std::isfinite(x)) throw DomainError("lambert_w: argument not finite");
  // Tolerate rounding in a computed -1/e.
  if (x < -kInvE) {
    if (x < -kInvE * (1.0 + 1e-15)) {
      throw DomainError("lambert_w: x = " + std::to_string(x) + " below -1/e");
    }
    x = -kInvE;
  }
  if (branch == -1 && x >= 0.0) throw DomainError("lambert_w: branch -1 needs -1/e <= x < 0");
  if (x == -kInvE) return -1.0;
  if (x == 0.0) return 0.0;

  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  double w = initial_guess(x, branch);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    if (!std::isfinite(next)) break;
    w = next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w))) break;
  }
  if (std::abs(w * std::exp(w) - x) > tol) {
    throw ConvergenceError("lambert_w: no convergence at x = " + std::to_string(x));
  }
  return w;
}

}  // namespace cheng::odesolve
