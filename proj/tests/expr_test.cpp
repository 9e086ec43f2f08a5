#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"

using namespace cheng::expr;

namespace {

Expr P(const char* s) { return parse(s); }

double eval(const Expr& e, std::initializer_list<std::pair<const char*, double>> values) {
  Environment env;
  for (const auto& [k, v] : values) env.set(k, v);
  return evaluate(e, env);
}

// Random tree over x, y with operations that stay finite on [0.5, 2].
Expr random_tree(std::mt19937_64& rng, int depth) {
  const auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  if (depth == 0 || pick(4) == 0) {
    switch (pick(3)) {
      case 0: return symbol("x");
      case 1: return symbol("y");
      default: return number(Rational(pick(7) + 1, pick(3) + 1));
    }
  }
  Expr a = random_tree(rng, depth - 1);
  Expr b = random_tree(rng, depth - 1);
  switch (pick(6)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / (b * b + 1);
    case 4: return exp(a / (a * a + 4));
    default: return log(a * a + 1);
  }
}

}  // namespace

TEST(Expression, CanonicalOrdering) {
  EXPECT_EQ(P("x*y + 1"), P("1 + y*x"));
  EXPECT_EQ(P("x + x"), P("2*x"));
  EXPECT_EQ(number(Rational(4) / -6).value(), Rational(-2, 3));
  EXPECT_TRUE((P("x") - P("x")).is_zero());
}

TEST(Expression, RoundTripThroughPrinter) {
  for (const char* s : {"-a*u*v", "w'(f)/w(f) - w''(f)", "D[g,1,0](x,t)*v", "exp(-C0*(x - c*t))",
                        "c/((n*a*b + c*C0)*n)", "x^(1/2) + log(x)/3"}) {
    Expr e = P(s);
    EXPECT_EQ(parse(to_string(e)), e) << s << " -> " << to_string(e);
  }
}

TEST(Expression, NegatedSumTermKeepsParentheses) {
  // x - (t - 1/2), built without expanding the inner sum.
  Expr e = sum({P("x"), product({number(-1), sum({P("t"), number(Rational(-1, 2))})})});
  EXPECT_EQ(to_string(e), "x - (-1/2 + t)");
  EXPECT_EQ(parse(to_string(e)), e);
}

TEST(Differentiate, Constant) { EXPECT_TRUE(differentiate(number(5), "x").is_zero()); }

TEST(Differentiate, ProductOfAtoms) {
  Expr u = P("u(t,x)");
  Expr v = P("v(t,x)");
  Expr d = differentiate(-P("a") * u * v, "x");
  Expr expected = -P("a") * (P("D[u,0,1](t,x)") * v + u * P("D[v,0,1](t,x)"));
  EXPECT_TRUE(normalize(d - expected).is_zero());
}

TEST(Differentiate, ExponentialAgainstFiniteDifference) {
  Expr e = P("exp(-C0*(x - c*t))");
  Expr d = differentiate(e, "t");
  EXPECT_TRUE(normalize(d - P("c*C0*exp(-C0*(x - c*t))")).is_zero());
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const double t = 2 * unit_double(rng()) - 1;
    const double x = 2 * unit_double(rng()) - 1;
    const double c0 = 0.5 + unit_double(rng());
    const double c = 0.5 + unit_double(rng());
    const double h = 1e-6;
    const double fd = (eval(e, {{"t", t + h}, {"x", x}, {"C0", c0}, {"c", c}}) -
                       eval(e, {{"t", t - h}, {"x", x}, {"C0", c0}, {"c", c}})) /
                      (2 * h);
    const double exact = eval(d, {{"t", t}, {"x", x}, {"C0", c0}, {"c", c}});
    EXPECT_NEAR(fd, exact, 1e-6 * std::abs(exact));
  }
}

TEST(Differentiate, LinearityOnRandomTrees) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    Expr e1 = random_tree(rng, 3);
    Expr e2 = random_tree(rng, 3);
    const Rational alpha(static_cast<int>(rng() % 9) - 4, 3);
    const Rational beta(static_cast<int>(rng() % 7) + 1, 2);
    Expr lhs = differentiate(alpha * e1 + beta * e2, "x");
    Expr rhs = alpha * differentiate(e1, "x") + beta * differentiate(e2, "x");
    EXPECT_TRUE(is_zero(lhs - rhs, 42)) << to_string(e1) << " | " << to_string(e2);
  }
}

TEST(Differentiate, FiniteDifferenceConsistency) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    Expr e = random_tree(rng, 4);
    Expr d = differentiate(e, "x");
    const double x = 0.5 + 1.5 * unit_double(rng());
    const double y = 0.5 + 1.5 * unit_double(rng());
    const double h = 1e-6;
    const double fd = (eval(e, {{"x", x + h}, {"y", y}}) - eval(e, {{"x", x - h}, {"y", y}})) / (2 * h);
    const double exact = eval(d, {{"x", x}, {"y", y}});
    EXPECT_NEAR(fd, exact, 1e-5 * std::max(1.0, std::abs(exact))) << to_string(e);
  }
}

TEST(Substitute, SimilarityVariables) {
  Expr res = P("D[u,0,1](t,x) + a*u(t,x)*v(t,x)");
  Substitution s;
  s.bind_function("u", {"t", "x"}, P("w(x - c*t)"));
  s.bind_function("v", {"t", "x"}, P("k(x - c*t)"));
  Expr out = substitute(res, s);
  EXPECT_EQ(normalize(out), normalize(P("w'(x - c*t) + a*w(x - c*t)*k(x - c*t)")));
}

TEST(Substitute, EmptyBindingIsIdentity) { EXPECT_EQ(substitute(P("x"), Substitution{}), P("x")); }

TEST(Substitute, AtomDerivativeFromReplacement) {
  Substitution s;
  s.bind_function("g", {"s"}, P("s^2"));
  EXPECT_EQ(normalize(substitute(P("g'(x)"), s)), P("2*x"));
}

TEST(Substitute, IsSimultaneous) {
  Substitution s;
  s.bind("x", P("y")).bind("y", P("x"));
  EXPECT_EQ(substitute(P("x - 2*y"), s), P("y - 2*x"));
}

TEST(Substitute, EvaluateHomomorphism) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Expr e = random_tree(rng, 3);
    Expr r = random_tree(rng, 2);
    Substitution s;
    s.bind("y", r);
    const double x = 0.5 + 1.5 * unit_double(rng());
    const double lhs = eval(substitute(e, s), {{"x", x}, {"y", 0.0}});
    const double ry = eval(r, {{"x", x}, {"y", 0.0}});
    const double rhs = eval(e, {{"x", x}, {"y", ry}});
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Evaluate, Basic) {
  EXPECT_DOUBLE_EQ(eval(P("a*b"), {{"a", 2}, {"b", 3}}), 6.0);
  EXPECT_DOUBLE_EQ(eval(P("c/((n*a*b + c*C0)*n)"), {{"a", 1}, {"b", 1}, {"c", 1}, {"C0", 1}, {"n", 1}}), 0.5);
}

TEST(Evaluate, DomainErrors) {
  EXPECT_THROW(eval(P("1/(x - 1)"), {{"x", 1}}), EvaluationError);
  EXPECT_THROW(eval(P("log(x)"), {{"x", -1}}), EvaluationError);
  EXPECT_THROW(eval(P("exp(x)"), {{"x", 1e6}}), EvaluationError);
  try {
    eval(P("y + 1/(x - 1)"), {{"x", 1}, {"y", 0}});
    FAIL();
  } catch (const EvaluationError& err) {
    EXPECT_EQ(err.reason(), EvaluationError::Reason::Domain);
  }
  EXPECT_THROW(eval(P("z"), {}), EvaluationError);
}

TEST(Normalize, Basics) {
  EXPECT_EQ(normalize(P("x + x")), P("2*x"));
  EXPECT_TRUE(normalize(P("(a+b)^2 - a^2 - 2*a*b - b^2")).is_zero());
  EXPECT_TRUE(normalize(P("(x^2 - 1)/(x - 1) - x - 1")).is_zero());
  EXPECT_TRUE(normalize(P("1/(x+1) + 1/(x-1) - 2*x/(x^2-1)")).is_zero());
  EXPECT_TRUE(normalize(P("exp(x)*exp(-x) - 1")).is_zero());
  EXPECT_TRUE(normalize(P("exp(2*x) - exp(x)^2")).is_zero());
  EXPECT_TRUE(normalize(P("log(exp(x + y)) - x - y")).is_zero());
}

TEST(Normalize, RiccatiClosedFormResidual) {
  Expr m = P("c/((n*a*b + c*C0)*n)");
  Expr rhs = P("-n*M^2*a*b/c - M/n");
  Substitution s;
  s.bind("M", m);
  EXPECT_TRUE(normalize(differentiate(m, "n") - substitute(rhs, s)).is_zero());
}

TEST(Normalize, IdempotentAndValuePreserving) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    Expr e = random_tree(rng, 4);
    Expr n = normalize(e);
    EXPECT_EQ(normalize(n), n) << to_string(e);
    const double x = 0.5 + 1.5 * unit_double(rng());
    const double y = 0.5 + 1.5 * unit_double(rng());
    const double a = eval(e, {{"x", x}, {"y", y}});
    const double b = eval(n, {{"x", x}, {"y", y}});
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << to_string(e);
  }
}

TEST(Normalize, FractionAndDegree) {
  DegreeInfo d = degree_in(P("(a*m^3 + m)/(m + n)"), "m");
  EXPECT_EQ(d.numerator_max, 3);
  EXPECT_EQ(d.numerator_min, 1);
  EXPECT_EQ(d.denominator_max, 1);
  EXPECT_FALSE(d.non_polynomial);
  EXPECT_TRUE(degree_in(P("log(m) + 1"), "m").non_polynomial);
  Fraction f = as_fraction(P("1/m + m"));
  EXPECT_EQ(f.numerator, P("1 + m^2"));
  EXPECT_EQ(f.denominator, P("m"));
}

TEST(ZeroTest, Examples) {
  EXPECT_TRUE(is_zero(P("(n+1)^2 - n^2 - 2*n - 1"), 42));
  EXPECT_FALSE(is_zero(P("x - x^2"), 42));
  EXPECT_NEAR(eval(P("x - x^2"), {{"x", 0.7}}), 0.21, 1e-15);
  EXPECT_TRUE(is_zero(P("g'(x)*h(t) - D[g,1](x)*h(t)"), 1));
  EXPECT_FALSE(is_zero(P("g''(x) - g(x)"), 1));
}

TEST(ZeroTest, Reproducible) {
  Expr e = P("exp(x)*x - x*exp(x)*(1 + 1e-12*y)");
  EXPECT_EQ(zero_test(e, 9).max_abs, zero_test(e, 9).max_abs);
}

TEST(ZeroTest, AllSingularIsIndeterminate) {
  EXPECT_THROW(zero_test(P("log(-x - 1) + x"), 42), IndeterminateError);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("x +"), ParseError);
  EXPECT_THROW(parse("x^y"), ParseError);
  EXPECT_THROW(parse("D[g,1](x,y)"), ParseError);
  EXPECT_EQ(parse("1.25e1"), number(Rational(25, 2)));
  EXPECT_EQ(parse("sqrt(x)"), pow(symbol("x"), Rational(1, 2)));
}

TEST(Parse, VectorField) {
  auto vf = parse_vector_field("-v*D[g,1](x) d/dv + g(x) d/dx");
  ASSERT_EQ(vf.size(), 2u);
  EXPECT_EQ(vf[0].first, "v");
  EXPECT_EQ(vf[0].second, P("-v*g'(x)"));
  EXPECT_EQ(vf[1].first, "x");
  auto du = parse_vector_field("d/du");
  ASSERT_EQ(du.size(), 1u);
  EXPECT_EQ(du[0].second, number(1));
  auto scaling = parse_vector_field("t*d/dt - u d/du");
  EXPECT_EQ(scaling[1].second, P("-u"));
  EXPECT_THROW(parse_vector_field("x d/dx + d/dx"), ParseError);
}
