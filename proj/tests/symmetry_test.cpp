#include <cmath>

#include <gtest/gtest.h>

#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"
#include "cheng/symmetry/catalog.hpp"

using namespace cheng;
using namespace cheng::symmetry;
using expr::parse;

namespace {

bool same(const expr::Expr& a, const expr::Expr& b) { return expr::normalize(a - b).is_zero(); }

}  // namespace

TEST(Jet, RoundTrip) {
  const auto& sys = catalog_system("cheng");
  JetSpace jet(sys);
  expr::Expr e = parse("D[u,0,1](t,x)*v(t,x) + D[v,1,1](t,x)");
  expr::Expr j = jet.to_jet(e);
  EXPECT_EQ(j, parse("u_x*v + v_tx"));
  EXPECT_EQ(jet.from_jet(j), e);
  EXPECT_EQ(jet.total_derivative(parse("u*v"), 1), parse("u_x*v + u*v_x"));
  EXPECT_THROW(jet.to_jet(parse("u(x, t)")), std::invalid_argument);
}

TEST(Jet, SolveLeading) {
  const auto& sys = catalog_system("cheng");
  JetSpace jet(sys);
  auto solved = solve_leading(sys, jet);
  EXPECT_TRUE(same(solved.at("u_x"), parse("-a*u*v")));
  EXPECT_TRUE(same(solved.at("v_t"), parse("-a*b*u*v")));
}

TEST(Jet, UnsolvableLeadingDerivative) {
  PDESystem bad = catalog_system("cheng");
  bad.id = "bad";
  bad.residuals[0] = parse("D[u,0,1](t,x)^2 + a*u(t,x)*v(t,x)");
  JetSpace jet(bad);
  try {
    solve_leading(bad, jet);
    FAIL();
  } catch (const ManifoldRestrictionError& e) {
    ASSERT_EQ(e.unsolved().size(), 1u);
    EXPECT_EQ(e.unsolved()[0], "u_x");
  }
}

TEST(Prolong, TranslationProlongsToZero) {
  auto pf = prolong(VectorField::parse("d/df"), 2, catalog_system("travelling"));
  for (const auto& [name, c] : pf.coefficients) EXPECT_TRUE(c.is_zero()) << name;
}

TEST(Prolong, ScalingCoefficients) {
  const auto& sys = catalog_system("travelling");
  auto vf = VectorField::parse("f d/df - w d/dw");
  EXPECT_TRUE(same(prolong(vf, 1, sys).coefficient("w_f"), parse("-2*w_f")));
  EXPECT_TRUE(same(prolong(vf, 2, sys).coefficient("w_ff"), parse("-3*w_ff")));
  EXPECT_THROW(prolong(vf, 3, sys), UnsupportedOrderError);
}

TEST(Prolong, MixedSecondOrder) {
  // For t d/dt the mixed coordinate scales like u_tx -> -u_tx.
  auto pf = prolong(VectorField::parse("t d/dt"), 2, catalog_system("space-dep"));
  EXPECT_TRUE(same(pf.coefficient("u_tx"), parse("-u_tx")));
  EXPECT_TRUE(same(pf.coefficient("u_tt"), parse("-2*u_tt")));
  EXPECT_TRUE(pf.coefficient("u_xx").is_zero());
}

TEST(SymmetryResidual, GeneralFamilyVanishesIdentically) {
  for (const char* id : {"Gamma1", "Gamma2"}) {
    auto r = symmetry_residual(catalog_system("cheng"), paper_field(id).field);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_TRUE(r[0].is_zero());
    EXPECT_TRUE(r[1].is_zero());
  }
}

TEST(SymmetryResidual, NotASymmetry) {
  auto r = symmetry_residual(catalog_system("cheng"), VectorField::parse("d/du"));
  EXPECT_TRUE(same(r[0], parse("a*v")));
}

TEST(SymmetryResidual, TravellingScaling) {
  auto r = symmetry_residual(catalog_system("travelling"), paper_field("Gamma2B").field);
  EXPECT_TRUE(r[0].is_zero());
}

TEST(CheckSymmetry, ScalingAndSignFlip) {
  EXPECT_TRUE(check_symmetry(catalog_system("cheng"), paper_field("Gamma2C").field, 42).passed);
  auto flipped = check_symmetry(catalog_system("cheng"), VectorField::parse("x d/dx + v d/dv"), 42);
  EXPECT_FALSE(flipped.passed);
  // Hand computation: L(u_x + a u v) = -u_x + a u v = 2 a u v on solutions.
  EXPECT_TRUE(same(flipped.residuals[0], parse("2*a*u*v")));
}

TEST(CheckSymmetry, ConcreteInstantiations) {
  for (const char* g : {"1", "x", "x^2", "exp(x)", "x^3 + 2"}) {
    expr::Substitution s;
    s.bind_function("g", {"x"}, parse(g));
    EXPECT_TRUE(check_symmetry(catalog_system("cheng"), paper_field("Gamma1").field.substituted(s), 42).passed) << g;
  }
}

TEST(CheckSymmetry, SpaceDependentFieldNeedsLinearCoefficient) {
  auto r = check_symmetry(catalog_system("space-dep"), paper_field("c-field").field, 42);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(same(r.residuals[0], parse("-u*c(x)*c''(x)")));
  ASSERT_EQ(r.assignments.size(), 4u);
  EXPECT_TRUE(r.assignments[0].zero);   // c = 1
  EXPECT_TRUE(r.assignments[1].zero);   // c = s
  EXPECT_FALSE(r.assignments[2].zero);  // c = s^2
  EXPECT_FALSE(r.assignments[3].zero);  // c = exp(s)
}

TEST(CheckSymmetry, ScalingATranslationIsNotASymmetry) {
  auto r = check_symmetry(catalog_system("scaling-a"), paper_field("Gamma1D").field, 42);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(same(r.residuals[0], parse("-w_f*(b + 1/(a*w))/f")));
  EXPECT_TRUE(check_symmetry(catalog_system("scaling-a"), VectorField::parse("f d/df"), 42).passed);
}

TEST(CheckSymmetry, SpaceDependentOdeVariants) {
  EXPECT_TRUE(check_symmetry(catalog_system("space-dep-ode-derived"), paper_field("Gamma_b", "space-dep-ode-derived").field, 42).passed);
  auto printed = check_symmetry(catalog_system("space-dep-ode-as-printed"), paper_field("Gamma_b", "space-dep-ode-as-printed").field, 42);
  EXPECT_FALSE(printed.passed);
  EXPECT_TRUE(same(printed.residuals[0], parse("-2*w_a_f_a/w_a^2")));
}

TEST(CheckSymmetry, DeterministicAcrossRuns) {
  auto a = check_symmetry(catalog_system("space-dep"), paper_field("c-field").field, 7);
  auto b = check_symmetry(catalog_system("space-dep"), paper_field("c-field").field, 7);
  EXPECT_EQ(a.max_abs, b.max_abs);
}

TEST(LieBracket, GeneralFamiliesCommute) {
  auto br = lie_bracket(paper_field("Gamma1").field, paper_field("Gamma2").field);
  for (const auto& [c, e] : br.components()) EXPECT_TRUE(e.is_zero()) << c;
}

TEST(LieBracket, ScalingAndTranslation) {
  auto br = lie_bracket(VectorField::parse("d/dx"), VectorField::parse("x d/dx - v d/dv"));
  EXPECT_EQ(br.coefficient("x"), expr::Expr(1));
  EXPECT_TRUE(br.coefficient("v").is_zero());
}

TEST(GroupFlow, Translation) {
  auto r = group_flow(VectorField::parse("d/dx"), 0.3, {{"t", 1}, {"x", 2}, {"u", 5}, {"v", 7}});
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.point["x"], 2.3);
  EXPECT_EQ(r.point["t"], 1);
  EXPECT_EQ(r.point["u"], 5);
  EXPECT_EQ(r.point["v"], 7);
}

TEST(GroupFlow, ScalingClosedForm) {
  const double eps = 0.4;
  auto r = group_flow(VectorField::parse("t d/dt - u d/du"), eps, {{"t", 1.5}, {"x", 2}, {"u", 3}, {"v", 7}});
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.point["t"], 1.5 * std::exp(eps), 1e-14);
  EXPECT_NEAR(r.point["u"], 3 * std::exp(-eps), 1e-14);
}

TEST(GroupFlow, IdentityAtZero) {
  Point p{{"t", 1}, {"x", 2}, {"u", 3}, {"v", 4}};
  EXPECT_EQ(group_flow(paper_field("Gamma2E").field, 0.0, {{"f", 2}, {"w", 3}}).point.at("w"), 3);
  EXPECT_EQ(group_flow(VectorField::parse("u^2 d/du"), 0.0, p).point, p);
}

TEST(GroupFlow, IntegratedFlowMatchesAnalytic) {
  // d/de u = u^2  =>  u(e) = u0 / (1 - e u0)
  auto r = group_flow(VectorField::parse("u^2 d/du"), 0.2, {{"u", 2.0}});
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.point["u"], 2.0 / (1 - 0.4), 1e-9);
  EXPECT_THROW(group_flow(VectorField::parse("u^2 d/du"), 1.0, {{"u", 2.0}}), FlowError);
}

TEST(GroupFlow, GroupLaw) {
  const Point p{{"t", 1.2}, {"x", 0.7}, {"u", 2.0}, {"v", 0.5}};
  expr::Environment env;
  env.set_function("g", [](std::span<const double> a, std::span<const int> d) {
    return d[0] == 0 ? 1.0 + a[0] * a[0] : 2.0 * a[0];
  });
  for (const char* text : {"d/dx", "t d/dt - u d/du", "x d/dx - v d/dv", "-v*g'(x) d/dv + g(x) d/dx"}) {
    auto vf = VectorField::parse(text);
    auto two = group_flow(vf, 0.3, group_flow(vf, 0.2, p, env).point, env).point;
    auto one = group_flow(vf, 0.5, p, env).point;
    for (const auto& [k, v] : one) EXPECT_NEAR(two.at(k), v, 1e-8) << text << " " << k;
  }
}

TEST(Catalog, UnknownIdentifiers) {
  EXPECT_THROW(catalog_system("nope"), UnknownIdentifier);
  EXPECT_THROW(paper_field("Gamma9"), UnknownIdentifier);
  EXPECT_EQ(paper_field("tau", "space-dep").system, "space-dep");
}

TEST(VectorFieldText, RoundTrip) {
  for (const auto& f : paper_fields()) {
    auto again = VectorField::parse(f.field.to_string());
    for (const auto& c : f.field.coordinates()) {
      EXPECT_TRUE(same(again.coefficient(c), f.field.coefficient(c))) << f.id;
    }
  }
}
