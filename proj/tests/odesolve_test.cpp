#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/odesolve/abel.hpp"
#include "cheng/odesolve/closed_forms.hpp"
#include "cheng/odesolve/integrate.hpp"
#include "cheng/odesolve/lambert_w.hpp"

using namespace cheng;
using namespace cheng::odesolve;

namespace {

double bisect_w(double x, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((mid * std::exp(mid) - x) * (lo * std::exp(lo) - x) <= 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double riccati(double a, double b, double c, double n, double m) { return -n * m * m * a * b / c - m / n; }

}  // namespace

TEST(LambertW, KnownValues) {
  EXPECT_EQ(lambert_w(0.0, 0), 0.0);
  EXPECT_NEAR(lambert_w(std::numbers::e, 0), 1.0, 1e-15);
  EXPECT_NEAR(lambert_w(-1.0 / std::numbers::e, -1), -1.0, 1e-15);
  EXPECT_NEAR(lambert_w(-1.0 / std::numbers::e, 0), -1.0, 1e-15);
  const double oracle = bisect_w(1.0, 0.0, 1.0);
  EXPECT_NEAR(oracle, 0.5671432904097838, 1e-15);
  EXPECT_NEAR(lambert_w(1.0, 0), oracle, 1e-12);
  EXPECT_NEAR(lambert_w(-0.1, -1), bisect_w(-0.1, -10.0, -1.0), 1e-12);
}

TEST(LambertW, DefiningIdentityBothBranches) {
  const double lo = -1.0 / std::numbers::e + 1e-6;
  for (int i = 0; i < 200; ++i) {
    // Log-spaced in the distance from the branch point.
    const double t = i / 199.0;
    const double x0 = lo + (std::pow(10.0, std::log10(1e6 - lo + 1.0) * t) - 1.0);
    const double w0 = lambert_w(x0, 0);
    EXPECT_LE(std::abs(w0 * std::exp(w0) - x0), 1e-12 * std::abs(x0)) << x0;
    const double x1 = -std::pow(10.0, std::log10(-lo) + (std::log10(1e-300) - std::log10(-lo)) * t);
    const double w1 = lambert_w(x1, -1);
    EXPECT_LE(std::abs(w1 * std::exp(w1) - x1), 1e-12 * std::abs(x1)) << x1;
    EXPECT_LE(w1, -1.0);
  }
}

TEST(LambertW, DomainErrors) {
  EXPECT_THROW(lambert_w(-0.5, 0), DomainError);
  EXPECT_THROW(lambert_w(0.5, -1), DomainError);
  EXPECT_THROW(lambert_w(0.0, -1), DomainError);
  EXPECT_THROW(lambert_w(1.0, 2), DomainError);
}

TEST(ClosedForms, RiccatiValuesAndResidual) {
  auto m = riccati_closed_form(1, 1, 1, 1);
  EXPECT_DOUBLE_EQ(m(1.0), 0.5);
  EXPECT_NEAR(m(2.0), 1.0 / 6.0, 1e-15);
  expr::Expr sol = riccati_solution_symbolic();
  expr::Substitution s;
  s.bind("m", sol);
  expr::Expr rhs = expr::substitute(expr::parse("-n*m^2*a*b/c - m/n"), s);
  EXPECT_TRUE(expr::normalize(expr::differentiate(sol, "n") - rhs).is_zero());
  EXPECT_THROW(riccati_closed_form(1, 1, 1, -1)(1.0), expr::EvaluationError);
}

TEST(ClosedForms, EulerValuesAndResidual) {
  EXPECT_DOUBLE_EQ(euler_linear_closed_form(1, 1, 1, 0, EulerEquation::Travelling)(2.0), 4.0);
  EXPECT_DOUBLE_EQ(euler_linear_closed_form(1, 1, 1, 1, EulerEquation::Scaling)(1.0), 0.0);
  EXPECT_NEAR(euler_linear_closed_form(2, 3, 0.5, 7, EulerEquation::Travelling)(1e-9), 0.0, 1e-7);
  for (auto which : {EulerEquation::Travelling, EulerEquation::Scaling}) {
    const bool travelling = which == EulerEquation::Travelling;
    expr::Expr sol = euler_solution_symbolic(which);
    expr::Substitution s;
    s.bind(travelling ? "m" : "v", sol);
    expr::Expr rhs = expr::substitute(expr::parse(travelling ? "n*a*b/c + m/n" : "-r*a*b + v/r"), s);
    EXPECT_TRUE(expr::normalize(expr::differentiate(sol, travelling ? "n" : "r") - rhs).is_zero());
  }
}

TEST(Integrate, RiccatiAgainstClosedForm) {
  auto traj = integrate([](double n, double m) { return riccati(1, 1, 1, n, m); }, 1.0, 0.5, 2.0);
  ASSERT_EQ(traj.status, Status::Completed);
  EXPECT_NEAR(traj.y.back()[0], 1.0 / 6.0, 1e-8);
  for (double e : traj.error) EXPECT_LE(e, 1.0);
}

TEST(Integrate, EulerAgainstClosedForm) {
  auto traj = integrate([](double n, double m) { return n + m / n; }, 1.0, 1.0, 3.0);
  EXPECT_NEAR(traj.y.back()[0], 9.0, 1e-8);
}

TEST(Integrate, ConstantSolution) {
  auto traj = integrate([](double, double) { return 0.0; }, 0.0, 3.5, 10.0);
  for (const auto& y : traj.y) EXPECT_EQ(y[0], 3.5);
}

TEST(Integrate, RoundingRemainderIsNotAnUnderflow) {
  // Four steps of span/4 fall short of x1 by a few ulps.
  const double x0 = 1.0, x1 = 1.0019;
  auto traj = integrate([](double, double y) { return -y; }, x0, 1.0, x1,
                        {.rtol = 1e-12, .atol = 1e-14, .max_step = (x1 - x0) / 4});
  EXPECT_EQ(traj.status, Status::Completed) << traj.message;
  EXPECT_EQ(traj.x.back(), x1);
}

TEST(Integrate, BackwardSpanAndDenseOutput) {
  auto traj = integrate([](double, double y) { return y; }, 1.0, std::exp(1.0), -1.0, {.max_step = 0.05});
  ASSERT_EQ(traj.status, Status::Completed);
  EXPECT_NEAR(traj.y.back()[0], std::exp(-1.0), 1e-10);
  EXPECT_NEAR(traj.at(0.123, 0), std::exp(0.123), 1e-7);
  EXPECT_THROW(traj.at(1.5), std::out_of_range);
}

TEST(Integrate, FourthOrderConvergenceFixedStep) {
  std::vector<double> errors;
  for (double h : {0.1, 0.05, 0.025}) {
    auto traj = integrate([](double, double y) { return y; }, 0.0, 1.0, 1.0, {.fixed_step = h});
    errors.push_back(std::abs(traj.y.back()[0] - std::numbers::e));
  }
  EXPECT_GE(std::log2(errors[0] / errors[1]), 4.0);
  EXPECT_GE(std::log2(errors[1] / errors[2]), 4.0);
}

TEST(Integrate, StopsAtPole) {
  // y = 1 / (1 - x) blows up at x = 1.
  auto traj = integrate([](double, double y) { return y * y; }, 0.0, 1.0, 2.0);
  EXPECT_EQ(traj.status, Status::SingularStop);
  EXPECT_LT(traj.x.back(), 1.0);
  EXPECT_GT(traj.x.back(), 0.99);
}

TEST(Integrate, MonitorStopsBeforeSignChange) {
  IntegratorOptions o;
  o.monitor = [](double, std::span<const double> y) { return y[0] - 0.5; };
  auto traj = integrate([](double, double) { return -1.0; }, 0.0, 1.0, 1.0, o);
  EXPECT_EQ(traj.status, Status::SingularStop);
  EXPECT_GT(traj.y.back()[0], 0.5);
  EXPECT_NEAR(traj.y.back()[0], 0.5, 1e-6);
}

TEST(Integrate, CsvColumns) {
  auto traj = integrate([](double, double y) { return y; }, 0.0, 1.0, 0.1);
  EXPECT_EQ(traj.to_csv().substr(0, 17), "x,y,err_estimate\n");
}

TEST(Integrate, ClosedFormAgreementOverParameterGrid) {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      for (double c : {0.5, 1.0, 2.0}) {
        for (double k : {1.0, 2.0}) {
          auto m = riccati_closed_form(a, b, c, k);
          auto traj = integrate([&](double n, double y) { return riccati(a, b, c, n, y); }, 1.0, m(1.0), 5.0);
          ASSERT_EQ(traj.status, Status::Completed);
          auto e = euler_linear_closed_form(a, b, c, k, EulerEquation::Travelling);
          auto te = integrate([&](double n, double y) { return n * a * b / c + y / n; }, 1.0, e(1.0), 5.0);
          for (int i = 0; i <= 40; ++i) {
            const double n = 1.0 + 0.1 * i;
            EXPECT_NEAR(traj.at(n, 0), m(n), 1e-8);
            EXPECT_NEAR(te.at(n, 0), e(n), 1e-8 * std::max(1.0, std::abs(e(n))));
          }
        }
      }
    }
  }
}

TEST(Abel, SecondKindStepHalving) {
  IntegratorOptions coarse{.fixed_step = 0.01};
  IntegratorOptions fine{.fixed_step = 0.005};
  auto one = abel_solve_numeric(AbelEquation::ScalingInvariant, {}, 1.5, 1.5, 1.51, coarse);
  auto two = abel_solve_numeric(AbelEquation::ScalingInvariant, {}, 1.5, 1.5, 1.51, fine);
  EXPECT_NEAR(one.y.back()[0], two.y.back()[0], 1e-9);
}

TEST(Abel, SecondKindMonitorStops) {
  // For 0 < r < 1 the term (r^2 - r)/v pushes a small positive v to 0.
  auto traj = abel_solve_numeric(AbelEquation::ScalingInvariant, {}, 0.5, 0.05, 0.9);
  EXPECT_EQ(traj.status, Status::SingularStop);
  for (const auto& y : traj.y) EXPECT_GT(y[0], 0.0);
  EXPECT_LT(traj.x.back(), 0.6);
}

TEST(Abel, PrintedAndDerivedAgreeAtUnitSpeed) {
  expr::Expr d = abel_rhs(AbelEquation::TravellingInvariant, EquationForm::Derived);
  expr::Expr p = abel_rhs(AbelEquation::TravellingInvariant, EquationForm::AsPrinted);
  expr::Substitution s;
  s.bind("c", 1);
  EXPECT_TRUE(expr::normalize(expr::substitute(d - p, s)).is_zero());
  EXPECT_FALSE(expr::normalize(d - p).is_zero());
}
