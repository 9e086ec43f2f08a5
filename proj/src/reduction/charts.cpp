#include "cheng/reduction/charts.hpp"

#include <algorithm>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"
#include "cheng/symmetry/catalog.hpp"

namespace cheng::reduction {

using expr::Substitution;
using symmetry::JetSpace;

const char* to_string(ChartKind kind) {
  return kind == ChartKind::Canonical ? "canonical" : "invariants";
}

namespace {

struct ChartSpec {
  const char* reduction;
  ChartKind kind;
  int index;
  const char* system;
  const char* generator;
  const char* n;
  const char* m;
  const char* w_inverse;  // nullptr: no inverse
  const char* w_f_inverse;
  OdeTag tag;
  bool printed_target;
  bool as_printed = false;
  bool corrected = false;
  const char* note = "";
};

std::vector<CoordinateChart> build_charts() {
  using enum ChartKind;
  using enum OdeTag;
  const ChartSpec specs[] = {
      {"case1", Canonical, 1, "travelling", "Gamma1B", "w", "1/w_f", "n", "1/m", RiccatiFirstOrder, true},
      {"case1", DifferentialInvariants, 1, "travelling", "Gamma1B", "w", "w_f", "n", "m", EulerLinearFirstOrder,
       true},
      {"case1", Canonical, 2, "travelling", "Gamma2B", "f*w", "1/(f*(f*w_f + w))", "n/f", "(1 - n*m)/(f^2*m)",
       AbelFirstKind, true},
      {"case1", DifferentialInvariants, 2, "travelling", "Gamma2B", "f*w", "f^2*w_f", "n/f", "m/f^2",
       AbelSecondKind, true},
      // d/df is not a symmetry of the case2a equation; f d/df is.
      {"case2a", Canonical, 1, "scaling-a", "f d/df", "w", "1/(f*w_f)", "n", "1/(f*m)", RiccatiFirstOrder, false,
       false, false, "derived; the generator is f d/df"},
      {"case2a", DifferentialInvariants, 1, "scaling-a", "f d/df", "w", "f*w_f", "n", "m/f", EulerLinearFirstOrder,
       false, false, false, "derived; the generator is f d/df"},
      {"case2a", Canonical, 2, "scaling-a", "Gamma2D", "w*log(f)", "-1/(log(f)*(f*log(f)*w_f + w))", "n/log(f)",
       "-(1 + n*m)/(f*log(f)^2*m)", AbelFirstKind, false, false, false, "derived"},
      {"case2a", DifferentialInvariants, 2, "scaling-a", "Gamma2D", "w*log(f)", "-log(f)*(f*log(f)*w_f + w)",
       "n/log(f)", "-(m + n)/(f*log(f)^2)", AbelSecondKind, false, false, false, "derived"},
      {"case2b", Canonical, 1, "scaling-b", "Gamma1E", "w", "1/(f*(f*w_f + w))", "n", "(1 - f*n*m)/(f^2*m)",
       RiccatiFirstOrder, true, true, false, "as printed: r = w is not invariant under f d/df - w d/dw"},
      {"case2b", Canonical, 1, "scaling-b", "Gamma1E", "f*w", "1/(f*(f*w_f + w))", "n/f", "(1 - n*m)/(f^2*m)",
       RiccatiFirstOrder, true, false, true, "corrected: r = f w"},
      {"case2b", DifferentialInvariants, 1, "scaling-b", "Gamma1E", "f*w", "f^2*w_f", "n/f", "m/f^2",
       EulerLinearFirstOrder, true},
      {"case2b", Canonical, 2, "scaling-b", "Gamma2E", "w*f*log(f)", "1/(w*f*log(f))", nullptr, nullptr,
       AbelFirstKind, true, true, false, "as printed: v = 1/r depends on w only, the chart is singular"},
      {"case2b", Canonical, 2, "scaling-b", "Gamma2E", "w*f*log(f)",
       "1/(f*log(f)*(w*log(f) + w + f*log(f)*w_f))", "n/(f*log(f))",
       "(1 - n*m*(log(f) + 1))/(f^2*log(f)^2*m)", AbelFirstKind, true, false, true,
       "corrected: v = 1/(f log f (w log f + w + f log f w'))"},
      {"case2b", DifferentialInvariants, 2, "scaling-b", "Gamma2E", "w*f*log(f)",
       "(w*log(f) + w + f*log(f)*w_f)*f*log(f)", "n/(f*log(f))", "(m - n*(log(f) + 1))/(f^2*log(f)^2)",
       AbelSecondKind, true},
      {"space-dep", Canonical, 1, "space-dep-ode-derived", "Gamma_a", "w_a", "1/w_a_f_a", "n", "1/m",
       RiccatiFirstOrder, false},
      {"space-dep", DifferentialInvariants, 1, "space-dep-ode-derived", "Gamma_a", "w_a", "w_a_f_a", "n", "m",
       EulerLinearFirstOrder, false},
      {"space-dep", Canonical, 2, "space-dep-ode-derived", "Gamma_b", "f_a*w_a", "1/(f_a*(f_a*w_a_f_a + w_a))",
       "n/f_a", "(1 - n*m)/(f_a^2*m)", AbelFirstKind, false},
      {"space-dep", DifferentialInvariants, 2, "space-dep-ode-derived", "Gamma_b", "f_a*w_a", "f_a^2*w_a_f_a",
       "n/f_a", "m/f_a^2", AbelSecondKind, false},
  };
  std::vector<CoordinateChart> out;
  for (const auto& s : specs) {
    CoordinateChart c;
    const std::string base = std::string(s.reduction) + "-" + to_string(s.kind) + "-" + std::to_string(s.index);
    c.id = s.as_printed ? base + "-as-printed" : base;
    c.kind = s.kind;
    c.system = s.system;
    const std::string g = s.generator;
    c.generator = g.find("d/d") != std::string::npos ? VectorField::parse(g, g)
                                                     : symmetry::paper_field(g, s.system).field;
    c.generator_index = s.index;
    if (std::string(s.reduction) == "case2b") {
      c.new_independent = "r";
      c.new_dependent = "v";
    }
    Substitution rename;
    rename.bind("n", expr::symbol(c.new_independent));
    rename.bind("m", expr::symbol(c.new_dependent));
    c.n = expr::parse(s.n);
    c.m = expr::parse(s.m);
    if (s.w_inverse) {
      c.w_inverse = expr::substitute(expr::parse(s.w_inverse), rename);
      c.w_f_inverse = expr::substitute(expr::parse(s.w_f_inverse), rename);
    }
    c.corrected = s.corrected;
    c.as_printed = s.as_printed;
    c.note = s.note;
    if (s.printed_target) c.target = base;
    c.expected_tag = s.tag;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ReducedODE> build_targets() {
  using enum OdeTag;
  struct Spec {
    const char* id;
    OdeTag tag;
    const char* x;
    const char* y;
    const char* rhs;
  };
  const Spec specs[] = {
      {"case1-canonical-1", RiccatiFirstOrder, "n", "m", "-n*m^2*a*b/c - m/n"},
      {"case1-invariants-1", EulerLinearFirstOrder, "n", "m", "n*a*b/c + m/n"},
      {"case1-canonical-2", AbelFirstKind, "n", "m",
       "(n^3*a*b + c*n^2)*m^3/(c*n) + (-n^2*a*b - c*n)*m^2/(c*n) - m/n"},
      {"case1-invariants-2", AbelSecondKind, "n", "m", "m*(n^2*a*b + m + 2*c*n)/(c*n*(m + n))"},
      {"case2b-canonical-1", RiccatiFirstOrder, "r", "v", "v^2*r*a*b - v/r"},
      {"case2b-invariants-1", EulerLinearFirstOrder, "r", "v", "-r*a*b + v/r"},
      {"case2b-canonical-2", AbelFirstKind, "r", "v", "-(a*b*r^3 - r^2)*v^3/r - (-a*b*r^2 + r)*v^2/r - v/r"},
      {"case2b-invariants-2", AbelSecondKind, "r", "v", "v/r - r*a*b + 1 + (a*b*r^2 - r)/v"},
  };
  std::vector<ReducedODE> out;
  for (const auto& s : specs) out.push_back(first_order(s.id, s.tag, s.x, s.y, expr::parse(s.rhs)));
  return out;
}

template <class T>
const T& find_id(const std::vector<T>& v, std::string_view id, const char* what) {
  auto it = std::find_if(v.begin(), v.end(), [&](const T& c) { return c.id == id; });
  if (it == v.end()) throw symmetry::UnknownIdentifier(std::string("unknown ") + what + " '" + std::string(id) + "'");
  return *it;
}

// pr^(1) X applied to a function of (f, w, w_f).
Expr apply_prolonged(const symmetry::ProlongedField& pf, const PDESystem& ode, const Expr& e) {
  std::vector<Expr> terms;
  const std::string& x = ode.independent.front();
  terms.push_back(pf.base.coefficient(x) * expr::differentiate(e, x));
  for (const auto& [jet, coeff] : pf.coefficients) terms.push_back(coeff * expr::differentiate(e, jet));
  return expr::normalize(expr::sum(std::move(terms)));
}

struct Names {
  std::string w;
  std::string w_f;
};

Names jet_names(const PDESystem& ode) {
  const JetSpace jet(ode);
  return {jet.name(ode.dependent.front(), {0}), jet.name(ode.dependent.front(), {1})};
}

Expr jacobian(const PDESystem& ode, const CoordinateChart& c) {
  const Names j = jet_names(ode);
  return expr::normalize(expr::differentiate(c.n, j.w) * expr::differentiate(c.m, j.w_f) -
                         expr::differentiate(c.n, j.w_f) * expr::differentiate(c.m, j.w));
}

}  // namespace

const std::vector<CoordinateChart>& charts() {
  static const auto c = build_charts();
  return c;
}

const CoordinateChart& chart(std::string_view id) { return find_id(charts(), id, "chart"); }

const CoordinateChart& chart(std::string_view reduction, ChartKind kind, int generator_index) {
  return chart(std::string(reduction) + "-" + to_string(kind) + "-" + std::to_string(generator_index));
}

const std::vector<ReducedODE>& reduced_targets() {
  static const auto t = build_targets();
  return t;
}

const ReducedODE& reduced_target(std::string_view id) { return find_id(reduced_targets(), id, "reduced equation"); }

OdeTag classify(const Expr& rhs, const std::string& x, const std::string& y) {
  const auto d = expr::degree_in(rhs, y);
  if (d.non_polynomial) return OdeTag::Unclassified;
  if (d.denominator_max >= 1) return OdeTag::AbelSecondKind;
  switch (d.numerator_max) {
    case 3:
      return OdeTag::AbelFirstKind;
    case 2:
      return OdeTag::RiccatiFirstOrder;
    case 1: {
      const Expr c = expr::normalize(expr::differentiate(rhs, y) * expr::symbol(x));
      return expr::contains_symbol(c, x) ? OdeTag::Unclassified : OdeTag::EulerLinearFirstOrder;
    }
    default:
      return OdeTag::Unclassified;
  }
}

ChartCheck check_chart(const PDESystem& ode, const CoordinateChart& c, std::uint64_t seed) {
  ChartCheck out;
  out.generator_is_symmetry = symmetry::check_symmetry(ode, c.generator, seed).passed;
  const auto pf = symmetry::prolong(c.generator, 1, ode);
  out.n_invariant = expr::zero_test(apply_prolonged(pf, ode, c.n), seed).zero;
  out.m_invariant = expr::zero_test(apply_prolonged(pf, ode, c.m), seed).zero;
  out.jacobian_nonsingular = !expr::zero_test(jacobian(ode, c), seed).zero;
  if (c.w_inverse && c.w_f_inverse) {
    const Names j = jet_names(ode);
    Substitution s;
    s.bind(j.w, *c.w_inverse);
    s.bind(j.w_f, *c.w_f_inverse);
    out.inverse_consistent =
        expr::zero_test(expr::substitute(c.n, s) - expr::symbol(c.new_independent), seed).zero &&
        expr::zero_test(expr::substitute(c.m, s) - expr::symbol(c.new_dependent), seed).zero;
  }
  return out;
}

ReducedODE canonical_reduce(const PDESystem& ode, const VectorField& vf, const CoordinateChart& c,
                            std::uint64_t seed) {
  if (ode.independent.size() != 1 || ode.dependent.size() != 1 || ode.order != 2) {
    throw std::invalid_argument(ode.id + ": canonical_reduce needs a scalar second-order ODE");
  }
  const std::string& f = ode.independent.front();
  if (!symmetry::check_symmetry(ode, vf, seed).passed) {
    throw ReductionFailure(c.id + ": " + vf.to_string() + " is not a symmetry of " + ode.id);
  }
  if (expr::zero_test(jacobian(ode, c), seed).zero) {
    throw ReductionFailure(c.id + ": chart Jacobian in (w, w') vanishes identically");
  }
  if (!c.w_inverse || !c.w_f_inverse) throw ReductionFailure(c.id + ": chart has no inverse");

  const JetSpace jet(ode);
  const auto solved = symmetry::solve_leading(ode, jet);
  const Expr dn = symmetry::restrict_to_solutions(jet.total_derivative(c.n, 0), solved);
  const Expr dm = symmetry::restrict_to_solutions(jet.total_derivative(c.m, 0), solved);
  const Names j = jet_names(ode);
  Substitution s;
  s.bind(j.w, *c.w_inverse);
  s.bind(j.w_f, *c.w_f_inverse);
  Expr rhs = expr::normalize(expr::substitute(dm / dn, s));
  if (expr::contains_symbol(rhs, f)) {
    const auto pf = symmetry::prolong(vf, 1, ode);
    std::string why;
    if (!expr::zero_test(apply_prolonged(pf, ode, c.n), seed).zero) why += "; new independent not invariant";
    if (!expr::zero_test(apply_prolonged(pf, ode, c.m), seed).zero) why += "; new dependent not invariant";
    if (!expr::zero_test(expr::differentiate(rhs, f), seed).zero) {
      throw ReductionFailure(c.id + ": " + f + " remains in the reduced equation" + why, {f});
    }
    // Cancels only numerically (kernels like log f); fix a sample value.
    Substitution at;
    at.bind(f, 2);
    rhs = expr::normalize(expr::substitute(rhs, at));
  }
  ReducedODE out =
      first_order(c.id, classify(rhs, c.new_independent, c.new_dependent), c.new_independent, c.new_dependent, rhs,
                  false);
  return out;
}

Comparison compare(const ReducedODE& derived, const ReducedODE& printed, std::uint64_t seed) {
  Comparison out;
  out.same_tag = derived.tag == printed.tag;
  if (!derived.rhs || !printed.rhs) throw std::invalid_argument("compare needs explicit first-order equations");
  out.difference = expr::normalize(*derived.rhs - *printed.rhs);
  out.equal = expr::zero_test(out.difference, seed).zero;
  return out;
}

}  // namespace cheng::reduction
