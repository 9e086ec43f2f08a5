#include "cheng/odesolve/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cheng::odesolve {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kAlpha = 0.7 / 5;
constexpr double kBeta = 0.4 / 5;
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

struct Stepper {
  const System& f;
  std::size_t n;
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp, y_new;

  Stepper(const System& fn, std::size_t dim)
      : f(fn), n(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim),
        y_new(dim) {}

  // One trial step from (x, y) with k1 = f(x, y) already set.  Returns the
  // weighted error norm; y_new and k7 = f(x + h, y_new) are filled.
  double step(double x, std::span<const double> y, double h, double rtol, double atol) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(x + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(x + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(x + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(x + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(x + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(x + h, y_new, k7);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      sum += (err / scale) * (err / scale);
    }
    return std::sqrt(sum / static_cast<double>(n));
  }
};

double initial_step(const System& f, double x0, std::span<const double> y0, std::span<const double> f0,
                    double direction, const IntegratorOptions& o) {
  const std::size_t n = y0.size();
  double d0 = 0.0;
  double d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / static_cast<double>(n));
  d1 = std::sqrt(d1 / static_cast<double>(n));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, o.max_step);
  std::vector<double> y1(n);
  std::vector<double> f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + direction * h0 * f0[i];
  f(x0 + direction * h0, y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5);
  double h = std::min({100 * h0, h1, o.max_step});
  if (!std::isfinite(h) || h <= 0) h = 1e-6;
  return h;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Completed: return "completed";
    case Status::SingularStop: return "singular-stop";
    case Status::MaxSteps: return "max-steps";
  }
  return "unknown";
}

Trajectory integrate(const System& f, double x0, std::vector<double> y0, double x1,
                     const IntegratorOptions& o) {
  const std::size_t n = y0.size();
  if (n == 0) throw std::invalid_argument("integrate: empty state");
  Trajectory traj;
  Stepper st(f, n);
  f(x0, y0, st.k1);
  traj.x.push_back(x0);
  traj.y.push_back(y0);
  traj.dydx.push_back(st.k1);
  traj.error.push_back(0.0);
  if (!finite(y0) || !finite(st.k1)) {
    traj.status = Status::SingularStop;
    traj.message = "right-hand side not finite at the initial point";
    return traj;
  }
  if (x1 == x0) return traj;

  const double direction = x1 > x0 ? 1.0 : -1.0;
  const bool fixed = o.fixed_step > 0.0;
  double h = fixed ? o.fixed_step : (o.initial_step > 0 ? o.initial_step : initial_step(f, x0, y0, st.k1, direction, o));
  h = std::min(h, o.max_step);
  double x = x0;
  std::vector<double> y = y0;
  double prev_err = 1e-4;
  double monitor_sign = 0.0;
  if (o.monitor) {
    const double m = o.monitor(x0, y0);
    if (m == 0.0 || !std::isfinite(m)) {
      traj.status = Status::SingularStop;
      traj.message = "monitor vanishes at the initial point";
      return traj;
    }
    monitor_sign = m > 0 ? 1.0 : -1.0;
  }
  bool rejected = false;

  for (std::size_t steps = 0;; ++steps) {
    if (steps >= o.max_steps) {
      traj.status = Status::MaxSteps;
      traj.message = "maximum number of steps reached";
      return traj;
    }
    const double remaining = std::abs(x1 - x);
    const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    bool last = false;
    // Absorb a rounding-sized remainder into this step.
    if (h >= remaining - min_step) {
      h = remaining;
      last = true;
    }
    if (h < min_step) {
      traj.status = Status::SingularStop;
      traj.message = "step size underflow near x = " + std::to_string(x);
      return traj;
    }
    const double hs = direction * h;
    double err = st.step(x, y, hs, o.rtol, o.atol);
    bool ok = std::isfinite(err) && finite(st.y_new) && finite(st.k7);
    if (ok && o.monitor) {
      const double m = o.monitor(x + hs, st.y_new);
      ok = std::isfinite(m) && m * monitor_sign > 0.0;
      if (!ok) err = std::numeric_limits<double>::infinity();
    }
    if (fixed) {
      if (!ok) {
        traj.status = Status::SingularStop;
        traj.message = "non-finite state in fixed-step mode";
        return traj;
      }
    } else if (!ok || err > 1.0) {
      const double factor = ok ? std::max(kMinFactor, kSafety * std::pow(err, -kAlpha)) : 0.25;
      h *= std::min(1.0, factor);
      rejected = true;
      continue;
    }
    x = last ? x1 : x + hs;
    y = st.y_new;
    st.k1 = st.k7;
    traj.x.push_back(x);
    traj.y.push_back(y);
    traj.dydx.push_back(st.k1);
    traj.error.push_back(err);
    if (last) return traj;
    if (!fixed) {
      const double e = std::max(err, 1e-10);
      double factor = kSafety * std::pow(e, -kAlpha) * std::pow(prev_err, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      if (rejected) factor = std::min(factor, 1.0);
      h = std::min(h * factor, o.max_step);
      prev_err = e;
      rejected = false;
    }
  }
}

Trajectory integrate(const ScalarRhs& f, double x0, double y0, double x1, const IntegratorOptions& o) {
  System sys = [&f](double x, std::span<const double> y, std::span<double> dy) { dy[0] = f(x, y[0]); };
  return integrate(sys, x0, {y0}, x1, o);
}

bool Trajectory::covers(double at) const {
  if (x.empty()) return false;
  const double lo = std::min(x.front(), x.back());
  const double hi = std::max(x.front(), x.back());
  return at >= lo && at <= hi;
}

std::vector<double> Trajectory::at(double t) const {
  if (!covers(t)) throw std::out_of_range("trajectory does not cover x = " + std::to_string(t));
  const bool increasing = x.size() < 2 || x.back() > x.front();
  std::size_t i = 0;
  if (x.size() >= 2) {
    auto it = increasing ? std::upper_bound(x.begin(), x.end(), t)
                         : std::upper_bound(x.begin(), x.end(), t, std::greater<>());
    const auto pos = static_cast<std::size_t>(it - x.begin());
    i = pos == 0 ? 0 : std::min(pos - 1, x.size() - 2);
  }
  if (x.size() == 1) return y.front();
  const double x0 = x[i];
  const double h = x[i + 1] - x0;
  const double s = (t - x0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  std::vector<double> out(dimension());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = h00 * y[i][k] + h10 * h * dydx[i][k] + h01 * y[i + 1][k] + h11 * h * dydx[i + 1][k];
  }
  return out;
}

double Trajectory::at(double t, std::size_t component) const { return at(t)[component]; }

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "x";
  if (dimension() == 1) {
    os << ",y";
  } else {
    for (std::size_t k = 0; k < dimension(); ++k) os << ",y" << k;
  }
  os << ",err_estimate\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << x[i];
    for (double v : y[i]) os << "," << v;
    os << "," << error[i] << "\n";
  }
  return os.str();
}

}  // namespace cheng::odesolve
