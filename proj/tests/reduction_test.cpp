#include <cmath>

#include <gtest/gtest.h>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"
#include "cheng/odesolve/integrate.hpp"
#include "cheng/reduction/charts.hpp"
#include "cheng/reduction/reduction.hpp"
#include "cheng/reduction/space_dependent.hpp"
#include "cheng/symmetry/catalog.hpp"

using namespace cheng;
using namespace cheng::reduction;
using expr::parse;

namespace {

const PDESystem& cheng_system() { return symmetry::catalog_system("cheng"); }

bool symbolic_equal(const expr::Expr& a, const expr::Expr& b) { return expr::normalize(a - b).is_zero(); }

}  // namespace

TEST(Reduction, TravellingWaveSystemAndMultipliers) {
  const auto r = reduce_travelling_wave(expr::symbol("c"));
  ASSERT_TRUE(r.system_check.passed) << r.system_check.message;
  ASSERT_EQ(r.system_check.matches.size(), 2u);
  // Residuals are lhs - rhs: u_x + a u v and v_t - b u_x.
  EXPECT_TRUE(symbolic_equal(r.system_check.matches[0].multiplier, 1));
  EXPECT_TRUE(symbolic_equal(r.system_check.matches[1].multiplier, -1));
  EXPECT_EQ(*r.system_check.matches[0].target, 0u);
  EXPECT_EQ(*r.system_check.matches[1].target, 1u);
}

TEST(Reduction, TravellingWaveElimination) {
  const auto r = reduce_travelling_wave(expr::symbol("c"));
  EXPECT_TRUE(r.elimination_check.passed);
  // c k' + b w' with k = -w'/(a w), by hand.
  const auto e = eliminate(r.system, "k");
  const auto by_hand = parse("c*(-w''(f)/(a*w(f)) + w'(f)^2/(a*w(f)^2)) + b*w'(f)");
  EXPECT_TRUE(symbolic_equal(e, by_hand)) << e;
}

TEST(Reduction, TravellingWaveUnitParameters) {
  const auto r = reduce_travelling_wave(expr::Expr(1));
  expr::Substitution ab;
  ab.bind("a", 1).bind("b", 1);
  const auto second = expr::substitute(r.second_order.system.residuals.front(), ab);
  EXPECT_TRUE(symbolic_equal(second, parse("-w'(f)^2/w(f)^2 + w''(f)/w(f) - w'(f)")));
  EXPECT_TRUE(r.system_check.passed);
}

TEST(Reduction, StationaryWaveRejected) {
  EXPECT_THROW(reduce_travelling_wave(expr::Expr(0)), DegenerateReduction);
  EXPECT_THROW(reduce_travelling_wave(parse("2 - 2")), DegenerateReduction);
  EXPECT_NO_THROW(reduce_travelling_wave(parse("-3/2")));
}

TEST(Reduction, IdentityTransform) {
  SimilarityTransform id;
  id.id = "identity";
  id.new_independent = {"t", "x"};
  id.independent_definitions = {expr::symbol("t"), expr::symbol("x")};
  id.new_dependent = {"u", "v"};
  id.dependent_definitions = {{"u", parse("u(t,x)")}, {"v", parse("v(t,x)")}};
  const auto r = verify_reduction(id, cheng_system(), cheng_system());
  EXPECT_TRUE(r.passed) << r.message;
  for (const auto& m : r.matches) EXPECT_TRUE(symbolic_equal(m.multiplier, 1));
}

TEST(Reduction, CorruptedTransformFails) {
  const auto r = reduce_travelling_wave(expr::symbol("c"));
  auto bad = r.transform;
  bad.independent_definitions = {parse("x + c*t")};
  const auto report = verify_reduction(bad, cheng_system(), r.system);
  EXPECT_FALSE(report.passed);
  ASSERT_EQ(report.matches.size(), 2u);
  EXPECT_TRUE(report.matches[0].target.has_value());
  EXPECT_FALSE(report.matches[1].target.has_value());
  EXPECT_TRUE(symbolic_equal(report.matches[1].leftover, parse("-2*b*w_f")));
}

TEST(Reduction, WrongArgumentIsReported) {
  auto tr = reduce_travelling_wave(expr::symbol("c")).transform;
  tr.dependent_definitions[0].second = parse("w(x + t)");
  const auto report = verify_reduction(tr, cheng_system(), reduce_travelling_wave(expr::symbol("c")).system);
  EXPECT_FALSE(report.passed);
  EXPECT_NE(report.message.find("not to the new independent"), std::string::npos);
}

TEST(Reduction, ScalingVariants) {
  const auto a = reduce_scaling(ScalingVariant::A);
  EXPECT_TRUE(a.system_check.passed);
  EXPECT_TRUE(a.elimination_check.passed);
  // f w' - a k w, k' + b w' against  -w_f/x^2 + a w k/(t x), (k_f + b w_f)/x^2.
  EXPECT_TRUE(symbolic_equal(a.system_check.matches[0].multiplier, parse("-1/(t*x)")));
  EXPECT_TRUE(symbolic_equal(a.system_check.matches[1].multiplier, parse("1/x^2")));

  const auto b = reduce_scaling(ScalingVariant::B);
  EXPECT_TRUE(b.system_check.passed);
  EXPECT_TRUE(b.elimination_check.passed);
  // The eliminated equation carries the a b w^3 term once cleared of 1/(a w^2).
  const auto e = expr::normalize(eliminate(b.system, "k") * parse("a*w(f)^2"));
  const auto d = expr::degree_in(e, "a");
  EXPECT_EQ(d.numerator_max, 1);
  expr::Substitution w0;
  w0.bind_function("w", {"f"}, parse("f"));
  EXPECT_TRUE(symbolic_equal(expr::substitute(e, w0), parse("2*a*b*f^3")));
}

TEST(Reduction, GeneralAbstractAtoms) {
  const auto r = reduce_general(parse("h(t)"), parse("g(x)"), GeneralVariant::I);
  EXPECT_TRUE(r.system_check.passed) << r.system_check.message;
  EXPECT_TRUE(r.elimination_check.passed);
  EXPECT_TRUE(symbolic_equal(r.system_check.matches[0].multiplier, parse("-1/(g(x)*h(t))")));
}

TEST(Reduction, GeneralConstantFunctionsAreTranslations) {
  const auto r = reduce_general(expr::Expr(1), expr::Expr(1), GeneralVariant::I);
  ASSERT_EQ(r.transform.quadratures.size(), 2u);
  for (double s : {0.3, 1.0, 2.5}) {
    EXPECT_NEAR(r.transform.quadratures[0].value(s), s, 1e-12);
    EXPECT_NEAR(r.transform.quadratures[1].value(s), s, 1e-12);
  }
  // h_a = t, g_a = x: f = t - x is the case1 variable at c = 1 with f -> -f.
  SimilarityTransform flipped;
  flipped.id = "flipped";
  flipped.independent_definitions = {parse("x - t")};
  flipped.new_dependent = {"w", "k"};
  flipped.dependent_definitions = {{"u", parse("w(f)")}, {"v", parse("k(f)")}};
  const auto case1 = reduce_travelling_wave(expr::Expr(1));
  EXPECT_TRUE(verify_reduction(flipped, cheng_system(), case1.system).passed);
  EXPECT_TRUE(r.system_check.passed);
}

TEST(Reduction, GeneralIdentityMatchesScalingNumerically) {
  // h = t, g = x: h_a = 1 + log t, g_a = 1 + log x, so f = log(t/x) and the
  // case2a variable is exp(f).  Integrate both reduced systems on a shared
  // grid and compare w, k.
  const auto r = reduce_general(parse("t"), parse("x"), GeneralVariant::I);
  ASSERT_TRUE(r.system_check.passed);
  EXPECT_NEAR(r.transform.quadratures[0].value(std::exp(1.0)), 2.0, 1e-10);
  const double a = 1.3, b = 0.7;
  auto general = [=](double, std::span<const double> y, std::span<double> d) {
    d[0] = a * y[0] * y[1];
    d[1] = -b * d[0];
  };
  auto scaling = [=](double s, std::span<const double> y, std::span<double> d) {
    d[0] = a * y[1] * y[0] / s;
    d[1] = -b * d[0];
  };
  const std::vector<double> y0{0.4, 0.9};
  // Short steps keep the cubic dense output well inside the tolerance.
  odesolve::IntegratorOptions opts;
  opts.max_step = 0.01;
  const auto tg = odesolve::integrate(general, 0.0, y0, 0.8, opts);
  const auto ts = odesolve::integrate(scaling, 1.0, y0, std::exp(0.8), opts);
  ASSERT_EQ(tg.status, odesolve::Status::Completed);
  ASSERT_EQ(ts.status, odesolve::Status::Completed);
  for (double f = 0.0; f <= 0.8; f += 0.1) {
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(tg.at(f, i), ts.at(std::exp(f), i), 1e-8);
  }
}

TEST(Reduction, GeneralSecondVariant) {
  const auto r = reduce_general(parse("2*t + 1"), parse("x^2 + 1"), GeneralVariant::II);
  EXPECT_TRUE(r.system_check.passed) << r.system_check.message;
  EXPECT_TRUE(r.elimination_check.passed);
  const auto c = reduce_general(parse("3"), parse("x"), GeneralVariant::II);
  EXPECT_TRUE(c.system_check.passed);
  EXPECT_THROW(reduce_general(parse("t^2"), parse("x"), GeneralVariant::II), DomainError);
  EXPECT_THROW(reduce_general(parse("h(t)"), parse("x"), GeneralVariant::II), DomainError);
}

TEST(Reduction, GeneralSecondVariantWrongWeightFails) {
  auto r = reduce_general(parse("2*t + 1"), parse("x^2 + 1"), GeneralVariant::II);
  r.transform.dependent_definitions[0].second = parse("exp(-g_a(x))*w(f)");
  EXPECT_FALSE(verify_reduction(r.transform, cheng_system(), r.system).passed);
}

TEST(Quadrature, ValuesAndDerivatives) {
  const QuadratureAtom log_atom{"h_a", "t", parse("1/t")};
  EXPECT_NEAR(log_atom.value(2.0), 1.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(log_atom.value(0.5), 1.0 - std::log(2.0), 1e-12);
  const auto fn = log_atom.function();
  const double at[1] = {1.5};
  const int d1[1] = {1}, d2[1] = {2};
  EXPECT_NEAR(fn(at, d1), 1.0 / 1.5, 1e-15);
  EXPECT_NEAR(fn(at, d2), -1.0 / (1.5 * 1.5), 1e-15);
  const auto e = expand_quadrature_derivatives(parse("D[h_a,2](t)*h_a(t)"), {log_atom});
  EXPECT_TRUE(symbolic_equal(e, parse("-h_a(t)/t^2")));
}

TEST(Quadrature, VanishingFunctionIsDomainError) {
  const QuadratureAtom atom{"g_a", "x", parse("1/(x - 3/2)")};
  EXPECT_THROW(atom.value(2.0), QuadratureDomainError);
  EXPECT_NO_THROW(atom.value(1.2));
  const QuadratureAtom root{"g_a", "x", parse("1/x^(1/2)")};
  EXPECT_THROW(root.value(-1.0), QuadratureDomainError);
}

TEST(Quadrature, ParametersMustBeBound) {
  const QuadratureAtom atom{"h_a", "t", parse("1/(p*t)")};
  EXPECT_FALSE(atom.numeric());
  expr::Environment env;
  env.set("p", 2.0);
  EXPECT_TRUE(atom.numeric(env));
  EXPECT_NEAR(atom.value(3.0, env), 1.0 + std::log(3.0) / 2.0, 1e-12);
}

TEST(Charts, ChecksHold) {
  for (const auto& c : charts()) {
    const auto k = check_chart(symmetry::catalog_system(c.system), c);
    SCOPED_TRACE(c.id);
    EXPECT_TRUE(k.generator_is_symmetry);
    if (c.as_printed) continue;
    EXPECT_TRUE(k.n_invariant);
    EXPECT_TRUE(k.m_invariant);
    EXPECT_TRUE(k.jacobian_nonsingular);
    EXPECT_TRUE(k.inverse_consistent);
  }
}

TEST(Charts, ReproducePrintedEquations) {
  for (const auto& c : charts()) {
    if (c.as_printed) continue;
    SCOPED_TRACE(c.id);
    const auto r = canonical_reduce(symmetry::catalog_system(c.system), c.generator, c);
    EXPECT_EQ(r.tag, c.expected_tag);
    if (c.target.empty()) continue;
    const auto cmp = compare(r, reduced_target(c.target));
    EXPECT_TRUE(cmp.same_tag);
    if (c.id == "case1-invariants-2") {
      // Derived numerator has c m^2/n where the printed one has m^2/n.
      EXPECT_FALSE(cmp.equal);
      EXPECT_TRUE(symbolic_equal(cmp.difference, parse("(m^2/n - m^2/(c*n))/(m + n)")));
    } else {
      EXPECT_TRUE(cmp.equal) << cmp.difference;
    }
  }
}

TEST(Charts, AbelSecondKindAgreesAtUnitSpeed) {
  const auto& c = chart("case1", ChartKind::DifferentialInvariants, 2);
  const auto r = canonical_reduce(symmetry::catalog_system(c.system), c.generator, c);
  expr::Substitution one;
  one.bind("c", 1);
  EXPECT_TRUE(symbolic_equal(expr::substitute(*r.rhs, one),
                             expr::substitute(*reduced_target(c.target).rhs, one)));
}

TEST(Charts, RiccatiExample) {
  const auto& c = chart("case1", ChartKind::Canonical, 1);
  const auto r = canonical_reduce(symmetry::catalog_system("travelling"), c.generator, c);
  EXPECT_EQ(r.tag, OdeTag::RiccatiFirstOrder);
  EXPECT_TRUE(symbolic_equal(*r.rhs, parse("-n*m^2*a*b/c - m/n")));
  const auto& e = chart("case2b", ChartKind::DifferentialInvariants, 1);
  const auto euler = canonical_reduce(symmetry::catalog_system("scaling-b"), e.generator, e);
  EXPECT_TRUE(symbolic_equal(*euler.rhs, parse("-r*a*b + v/r")));
}

TEST(Charts, PrintedChartsFail) {
  const auto& printed = chart("case2b-canonical-1-as-printed");
  try {
    canonical_reduce(symmetry::catalog_system("scaling-b"), printed.generator, printed);
    FAIL() << "expected ReductionFailure";
  } catch (const ReductionFailure& e) {
    EXPECT_EQ(e.leftover(), std::vector<std::string>{"f"});
  }
  const auto& singular = chart("case2b-canonical-2-as-printed");
  EXPECT_FALSE(check_chart(symmetry::catalog_system("scaling-b"), singular).jacobian_nonsingular);
  EXPECT_THROW(canonical_reduce(symmetry::catalog_system("scaling-b"), singular.generator, singular),
               ReductionFailure);
}

TEST(Charts, NonSymmetryRejected) {
  const auto& c = chart("case2a", ChartKind::Canonical, 1);
  const auto d_df = VectorField::parse("d/df");
  EXPECT_THROW(canonical_reduce(symmetry::catalog_system("scaling-a"), d_df, c), ReductionFailure);
}

TEST(Charts, Classification) {
  EXPECT_EQ(classify(parse("y^2*x + y"), "x", "y"), OdeTag::RiccatiFirstOrder);
  EXPECT_EQ(classify(parse("y^3 + x"), "x", "y"), OdeTag::AbelFirstKind);
  EXPECT_EQ(classify(parse("x/(y + x)"), "x", "y"), OdeTag::AbelSecondKind);
  EXPECT_EQ(classify(parse("3*y/x + x^2"), "x", "y"), OdeTag::EulerLinearFirstOrder);
  EXPECT_EQ(classify(parse("y + x"), "x", "y"), OdeTag::Unclassified);
  EXPECT_EQ(classify(parse("exp(y)"), "x", "y"), OdeTag::Unclassified);
  EXPECT_EQ(classify(parse("x"), "x", "y"), OdeTag::Unclassified);
}

TEST(Charts, TrajectoryTransport) {
  // Integrate the second-order equation, map into (n, m), and compare with
  // an independent integration of the reduced equation.
  const double a = 0.8, b = 1.1;
  for (const auto& c : charts()) {
    if (c.as_printed || c.system == "space-dep-ode-derived") continue;
    SCOPED_TRACE(c.id);
    const auto& ode = symmetry::catalog_system(c.system);
    const auto reduced = canonical_reduce(ode, c.generator, c);
    expr::Environment env;
    env.set("a", a).set("b", b).set("c", 1.7);
    const symmetry::JetSpace jet(ode);
    const auto solved = symmetry::solve_leading(ode, jet);
    const expr::CompiledExpr wff(solved.begin()->second, {"f", "w", "w_f"}, env);
    const expr::CompiledExpr big_n(c.n, {"f", "w", "w_f"}, env);
    const expr::CompiledExpr big_m(c.m, {"f", "w", "w_f"}, env);
    const expr::CompiledExpr rhs(*reduced.rhs, {c.new_independent, c.new_dependent}, env);
    auto second = [&](double f, std::span<const double> y, std::span<double> d) {
      const double in[3] = {f, y[0], y[1]};
      d[0] = y[1];
      d[1] = wff(in);
    };
    const double f0 = 2.0, f1 = 2.3;
    const auto tr = odesolve::integrate(second, f0, {0.5, 0.3}, f1);
    ASSERT_EQ(tr.status, odesolve::Status::Completed);
    auto nm = [&](double f) {
      const auto y = tr.at(f);
      const double in[3] = {f, y[0], y[1]};
      return std::pair{big_n(in), big_m(in)};
    };
    const auto [n0, m0] = nm(f0);
    const auto [n1, m1] = nm(f1);
    const auto red = odesolve::integrate(
        [&](double n, double m) {
          const double in[2] = {n, m};
          return rhs(in);
        },
        n0, m0, n1);
    ASSERT_EQ(red.status, odesolve::Status::Completed);
    EXPECT_NEAR(red.y.back()[0], m1, 1e-7);
  }
}

TEST(SpaceDependent, EliminationGivesProduct) {
  const auto e = check_space_elimination();
  EXPECT_TRUE(e.matches_ab);
  EXPECT_FALSE(e.matches_b_over_a);
}

TEST(SpaceDependent, ExactlyOneOdeVariant) {
  const auto r = reduce_space_dependent(parse("x"), parse("tau(t)"));
  EXPECT_TRUE(r.derived.passed);
  EXPECT_FALSE(r.as_printed.passed);
  ASSERT_EQ(r.fields.size(), 2u);
  EXPECT_TRUE(r.fields[0].passed);  // c'' = 0
  EXPECT_TRUE(r.fields[1].passed);
}

TEST(SpaceDependent, FieldNeedsLinearCoefficient) {
  const auto r = reduce_space_dependent(parse("x^2"), parse("1"));
  EXPECT_FALSE(r.fields[0].passed);
  EXPECT_TRUE(symbolic_equal(r.fields[0].residuals.front(), parse("-2*u*x^2")));
}

TEST(SpaceDependent, Closure) {
  const auto unit = reduce_space_dependent(parse("1"), parse("1"));
  EXPECT_TRUE(unit.printed_closure.closes);
  EXPECT_TRUE(unit.weighted_closure.closes);
  const auto linear = reduce_space_dependent(parse("3*x + 1"), parse("t"));
  EXPECT_FALSE(linear.printed_closure.closes);
  EXPECT_TRUE(linear.weighted_closure.closes);
  // w'' - w w' - w'^2/w + c' w^2 with c' = 3.
  EXPECT_TRUE(symbolic_equal(linear.weighted_closure.residual,
                             parse("w_a_f_af_a - w_a*w_a_f_a - w_a_f_a^2/w_a + 3*w_a^2")));
  EXPECT_FALSE(reduce_space_dependent(parse("x^2"), parse("1")).weighted_closure.closes);
}

TEST(SpaceDependent, StationaryConstraints) {
  EXPECT_TRUE(expr::normalize(stationary_constraint(parse("3*x"), parse("x"))).is_zero());
  EXPECT_TRUE(expr::normalize(stationary_constraint(parse("x^2"), parse("x^2"))).is_zero());
  EXPECT_FALSE(expr::normalize(stationary_constraint(parse("x^2"), parse("x"))).is_zero());
  // With u = s/c the equation is c (s/c)' = -(s s'/c) * constraint.
  const auto c = parse("c(x)"), s = parse("s(x)");
  const auto lhs = stationary_residual(c, s) * c + s * expr::differentiate(s, "x") * stationary_constraint(c, s);
  EXPECT_TRUE(expr::zero_test(lhs, 7).zero);
}
