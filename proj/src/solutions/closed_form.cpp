#include "cheng/solutions/closed_form.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"

namespace cheng::solutions {

using expr::parse;
using expr::Substitution;

const char* to_string(Form form) { return form == Form::Paper ? "paper" : "derived"; }

Form parse_form(const std::string& text) {
  if (text == "paper") return Form::Paper;
  if (text == "derived") return Form::Derived;
  throw std::invalid_argument("form must be 'paper' or 'derived', got '" + text + "'");
}

expr::Environment ClosedFormSolution::environment() const { return reduction::quadrature_environment(quadratures); }

namespace {

Substitution bind_parameters(const Parameters& p) {
  Substitution s;
  s.bind("a", expr::to_rational(p.a));
  s.bind("b", expr::to_rational(p.b));
  s.bind("c", expr::to_rational(p.c));
  s.bind("C0", expr::to_rational(p.C0));
  s.bind("C1", expr::to_rational(p.C1));
  return s;
}

Expr with(const char* text, const Substitution& s) { return expr::substitute(parse(text), s); }

// -W'(f)/(a W) with f -> arg.
Expr k_from_w(const Expr& w_of_f, const Expr& a, const Expr& arg, double sign) {
  Expr k = -expr::differentiate(w_of_f, "f") / (a * w_of_f);
  if (sign < 0) k = -k;
  Substitution at;
  at.bind("f", arg);
  return expr::substitute(expr::normalize(k), at);
}

}  // namespace

ClosedFormSolution travelling_solution(const Parameters& p, Form form) {
  if (p.a * p.b == 0.0) throw std::invalid_argument("travelling solution needs a b != 0");
  const Substitution s = bind_parameters(p);
  ClosedFormSolution out;
  out.id = "travelling";
  out.form = form;
  out.parameters = p;
  if (form == Form::Paper) {
    out.u = with("-c*C0/(-exp(-c*C0*((x - t) + C1)) + a*b)", s);
    out.v = with("c*C0/(a*(-1 + a*b*exp(c*C0*((x - t) + C1))))", s);
    out.singular = {with("-exp(-c*C0*((x - t) + C1)) + a*b", s)};
    out.singular_locus = "exp(-c C0 ((x - t) + C1)) = a b";
  } else {
    const Expr w = with("-c*C0/(-exp(-C0*(f + C1)) + a*b)", s);
    const Expr f = with("x - c*t", s);
    Substitution at;
    at.bind("f", f);
    out.u = expr::substitute(w, at);
    out.v = k_from_w(w, expr::to_rational(p.a), f, 1);
    out.singular = {with("-exp(-C0*((x - c*t) + C1)) + a*b", s)};
    out.singular_locus = "exp(-C0 ((x - c t) + C1)) = a b";
  }
  const Expr invariance = expr::to_rational(p.c) * expr::differentiate(out.u, "x") + expr::differentiate(out.u, "t");
  if (!expr::zero_test(invariance, 42).zero) {
    out.warnings.push_back("u is not a function of x - c t: travelling-wave invariance residual c u_x + u_t is nonzero");
  }
  return out;
}

ClosedFormSolution general_solution(const Expr& h, const Expr& g, const Parameters& p, Form form) {
  if (p.a * p.b == 0.0) throw std::invalid_argument("general solution needs a b != 0");
  for (const auto& [fn, var] : {std::pair{h, "t"}, std::pair{g, "x"}}) {
    if (!expr::function_names(fn).empty()) {
      throw std::invalid_argument("general solution needs concrete h and g, got " + expr::to_string(fn));
    }
    for (const auto& sym : expr::free_symbols(fn)) {
      if (sym != var) throw std::invalid_argument(std::string("function of ") + var + " expected: " + expr::to_string(fn));
    }
  }
  const Substitution s = bind_parameters(p);
  ClosedFormSolution out;
  out.id = "general";
  out.form = form;
  out.parameters = p;
  out.quadratures = {{"h_a", "t", expr::normalize(1 / h)}, {"g_a", "x", expr::normalize(1 / g)}};
  const Expr dh = expr::normalize(1 / h);
  const Expr dg = expr::normalize(1 / g);
  if (form == Form::Paper) {
    out.u = dh * with("C0/(exp(-C0*((x - t) + C1)) + a*b)", s);
    out.v = dg * with("-C0/(a*(-1 + a*b*exp(C0*((x - t) + C1))))", s);
    out.singular = {with("exp(-C0*((x - t) + C1)) + a*b", s), with("-1 + a*b*exp(C0*((x - t) + C1))", s)};
    out.singular_locus = "a b exp(C0 ((x - t) + C1)) = 1";
  } else {
    const Expr w = with("-C0/(a*b - exp(-C0*(f + C1)))", s);
    const Expr arg = parse("g_a(x) - h_a(t)");
    Substitution at;
    at.bind("f", arg);
    out.u = dh * expr::substitute(w, at);
    out.v = dg * k_from_w(w, expr::to_rational(p.a), arg, 1);
    out.singular = {expr::substitute(with("a*b - exp(-C0*(f + C1))", s), at)};
    out.singular_locus = "exp(-C0 (g_a(x) - h_a(t) + C1)) = a b";
  }
  return out;
}

namespace {

// z -> flow of z' = alpha + beta z at time eps.
Expr affine_flow(const symmetry::VectorField& vf, const std::string& coord, const Expr& z, double eps) {
  const Expr c = expr::normalize(vf.coefficient(coord));
  const Expr beta = expr::normalize(expr::differentiate(c, coord));
  Substitution at_zero;
  at_zero.bind(coord, 0);
  const Expr alpha = expr::normalize(expr::substitute(c, at_zero));
  if (!alpha.is_number() || !beta.is_number()) {
    throw std::invalid_argument(vf.label() + ": " + coord + " coefficient " + expr::to_string(c) +
                                " is not affine in " + coord + " alone");
  }
  if (beta.is_zero()) return z + alpha * expr::to_rational(eps);
  const double b = expr::to_double(beta.value());
  const Expr growth = expr::to_rational(std::expm1(b * eps));
  return z + (beta * z + alpha) * growth / beta;
}

}  // namespace

ClosedFormSolution transport_exact(const ClosedFormSolution& s, const symmetry::VectorField& vf, double eps) {
  for (const auto& c : vf.coordinates()) {
    if (c != "t" && c != "x" && c != "u" && c != "v") {
      throw std::invalid_argument(vf.label() + ": coordinate " + c + " is not one of t, x, u, v");
    }
  }
  Substitution back;
  back.bind("t", affine_flow(vf, "t", expr::symbol("t"), -eps));
  back.bind("x", affine_flow(vf, "x", expr::symbol("x"), -eps));
  ClosedFormSolution out = s;
  std::ostringstream id;
  id << s.id << " under exp(" << eps << " " << vf.label() << ")";
  out.id = id.str();
  out.u = affine_flow(vf, "u", expr::substitute(s.u, back), eps);
  out.v = affine_flow(vf, "v", expr::substitute(s.v, back), eps);
  for (auto& d : out.singular) d = expr::substitute(d, back);
  return out;
}

std::pair<Expr, Expr> cheng_residuals(const ClosedFormSolution& s) {
  auto d = [&](const Expr& e, const char* var) {
    return reduction::expand_quadrature_derivatives(expr::differentiate(e, var), s.quadratures);
  };
  const Expr a = expr::to_rational(s.parameters.a);
  const Expr b = expr::to_rational(s.parameters.b);
  const Expr ux = d(s.u, "x");
  return {ux + a * s.u * s.v, d(s.v, "t") - b * ux};
}

}  // namespace cheng::solutions
