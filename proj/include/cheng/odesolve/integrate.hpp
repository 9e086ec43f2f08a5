#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cheng::odesolve {

/// y' = F(x, y), written into `dydx`.
using System = std::function<void(double x, std::span<const double> y, std::span<double> dydx)>;

/// Scalar that must keep its sign along the solution (e.g. a denominator).
using Monitor = std::function<double(double x, std::span<const double> y)>;

enum class Status { Completed, SingularStop, MaxSteps };

const char* to_string(Status s);

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0: estimated
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
  /// Disables error control and takes steps of exactly this size.
  double fixed_step = 0.0;
  Monitor monitor;
};

/// Accepted steps of an integration.  `error[i]` is the weighted RMS norm of
/// the embedded error estimate of the step ending at x[i] (0 for the initial
/// point); accepted adaptive steps have error <= 1.
struct Trajectory {
  std::vector<double> x;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> dydx;
  std::vector<double> error;
  Status status = Status::Completed;
  std::string message;

  std::size_t dimension() const { return y.empty() ? 0 : y.front().size(); }
  bool covers(double at) const;
  /// Cubic Hermite interpolation between accepted steps.
  std::vector<double> at(double at) const;
  double at(double at, std::size_t component) const;
  /// CSV with columns x, y (or y0..yn), err_estimate.
  std::string to_csv() const;
};

/// Dormand-Prince 5(4) with proportional-integral step control.  Integrates
/// from x0 to x1 (either direction).  A step-size underflow, a non-finite
/// derivative or a sign change of the monitor ends the run with
/// Status::SingularStop and the trajectory up to the last accepted point.
Trajectory integrate(const System& f, double x0, std::vector<double> y0, double x1,
                     const IntegratorOptions& options = {});

using ScalarRhs = std::function<double(double x, double y)>;
Trajectory integrate(const ScalarRhs& f, double x0, double y0, double x1,
                     const IntegratorOptions& options = {});

}  // namespace cheng::odesolve
