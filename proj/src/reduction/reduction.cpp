#include "cheng/reduction/reduction.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"
#include "cheng/symmetry/catalog.hpp"

namespace cheng::reduction {

using expr::Kind;
using expr::Substitution;
using symmetry::JetSpace;
using symmetry::LeadingDerivative;

const char* to_string(OdeTag tag) {
  switch (tag) {
    case OdeTag::RiccatiFirstOrder:
      return "RiccatiFirstOrder";
    case OdeTag::EulerLinearFirstOrder:
      return "EulerLinearFirstOrder";
    case OdeTag::AbelFirstKind:
      return "AbelFirstKind";
    case OdeTag::AbelSecondKind:
      return "AbelSecondKind";
    case OdeTag::SecondOrderScalar:
      return "SecondOrderScalar";
    case OdeTag::FirstOrderSystem:
      return "FirstOrderSystem";
    case OdeTag::Unclassified:
      return "Unclassified";
  }
  return "?";
}

std::string ReducedODE::to_string() const {
  if (rhs) return dependent() + "'(" + independent() + ") = " + expr::to_string(*rhs);
  std::string out;
  for (const auto& r : system.residuals) out += (out.empty() ? "" : "; ") + expr::to_string(r) + " = 0";
  return out;
}

ReducedODE first_order(std::string id, OdeTag tag, const std::string& x, const std::string& y, Expr rhs,
                       bool printed) {
  const Expr atom = expr::function(y, {expr::symbol(x)});
  Substitution s;
  s.bind(y, atom);
  PDESystem sys{id, y + "' = " + expr::to_string(rhs), {x}, {y},
                {expr::function(y, {expr::symbol(x)}, {1}) - expr::substitute(rhs, s)}, {{y, {1}}}, 1};
  sys.validate();
  return {std::move(id), tag, std::move(sys), std::move(rhs), printed};
}

Expr SimilarityTransform::lifted(const std::string& old_dependent) const {
  auto it = std::find_if(dependent_definitions.begin(), dependent_definitions.end(),
                         [&](const auto& p) { return p.first == old_dependent; });
  if (it == dependent_definitions.end()) {
    throw std::invalid_argument(id + ": no definition for " + old_dependent);
  }
  Substitution s;
  for (std::size_t i = 0; i < new_independent.size(); ++i) s.bind(new_independent[i], independent_definitions[i]);
  return expr::substitute(it->second, s);
}

std::string SimilarityTransform::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < new_independent.size(); ++i) {
    os << (i ? ", " : "") << new_independent[i] << " = " << independent_definitions[i];
  }
  for (const auto& [name, def] : dependent_definitions) os << ", " << name << " = " << def;
  for (const auto& q : quadratures) {
    os << ", " << q.name << "' = " << q.integrand << " (" << q.name << "(1) = 1)";
  }
  return os.str();
}

std::optional<Expr> proportional(const Expr& s, const Expr& t, const JetSpace& jet, std::uint64_t seed,
                                 const expr::Environment& env);

namespace {

bool same(const Expr& a, const Expr& b) { return a == b || expr::normalize(a - b).is_zero(); }

std::set<std::string> derivative_jets(const Expr& e, const JetSpace& jet) {
  std::set<std::string> out;
  for (const auto& s : expr::free_symbols(e)) {
    for (const auto& d : jet.dependent()) {
      if (s.size() > d.size() + 1 && s.compare(0, d.size() + 1, d + "_") == 0) out.insert(s);
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

VerificationReport match(std::vector<Expr> source, std::vector<Expr> target, const JetSpace& jet,
                         std::uint64_t seed, const expr::Environment& env) {
  VerificationReport r;
  std::vector<bool> used(target.size(), false);
  bool ok = source.size() == target.size();
  for (std::size_t i = 0; i < source.size(); ++i) {
    EquationMatch m;
    m.source = i;
    // Prefer the target with the same index.
    std::vector<std::size_t> order;
    if (i < target.size()) order.push_back(i);
    for (std::size_t j = 0; j < target.size(); ++j) {
      if (j != i) order.push_back(j);
    }
    for (std::size_t j : order) {
      if (used[j]) continue;
      if (auto p = proportional(source[i], target[j], jet, seed, env)) {
        used[j] = true;
        m.target = j;
        m.multiplier = *p;
        break;
      }
    }
    if (!m.target) {
      ok = false;
      m.leftover = expr::normalize(i < target.size() ? source[i] - target[i] : source[i]);
    }
    r.matches.push_back(std::move(m));
  }
  r.passed = ok;
  if (source.size() != target.size()) {
    r.message = std::to_string(source.size()) + " source residuals, " + std::to_string(target.size()) +
                " target residuals";
  } else if (!ok) {
    r.message = "residuals are not proportional";
  }
  return r;
}

}  // namespace

std::optional<Expr> proportional(const Expr& s, const Expr& t, const JetSpace& jet, std::uint64_t seed,
                                 const expr::Environment& env) {
  if (expr::zero_test(t, seed, env).zero) return std::nullopt;
  const Expr ratio = expr::normalize(s / t);
  std::set<std::string> jets = derivative_jets(s, jet);
  for (const auto& j : derivative_jets(t, jet)) jets.insert(j);
  for (const auto& j : jets) {
    if (!expr::zero_test(expr::differentiate(ratio, j), seed, env).zero) return std::nullopt;
  }
  if (expr::zero_test(ratio, seed, env).zero) return std::nullopt;
  return ratio;
}

std::vector<Expr> transformed_residuals(const SimilarityTransform& tr, const PDESystem& source) {
  if (tr.new_independent.size() != tr.independent_definitions.size()) {
    throw std::invalid_argument(tr.id + ": one definition per new independent is required");
  }
  Substitution sub;
  for (const auto& d : source.dependent) sub.bind_function(d, source.independent, tr.lifted(d));

  JetSpace jet(tr.new_independent, tr.new_dependent, source.order + 1);
  std::vector<Expr> out;
  for (const auto& r : source.residuals) {
    Expr e = expand_quadrature_derivatives(expr::substitute(r, sub), tr.quadratures);
    e = expr::map_nodes(e, [&](const Expr& n) -> std::optional<Expr> {
      if (n.kind() != Kind::Function) return std::nullopt;
      if (std::find(tr.new_dependent.begin(), tr.new_dependent.end(), n.name()) == tr.new_dependent.end()) {
        return std::nullopt;
      }
      const auto args = n.children();
      bool ok = args.size() == tr.independent_definitions.size();
      for (std::size_t i = 0; ok && i < args.size(); ++i) ok = same(args[i], tr.independent_definitions[i]);
      if (!ok) {
        throw ReductionFailure(tr.id + ": " + n.name() + " is applied to " + expr::to_string(n) +
                               ", not to the new independent variables");
      }
      return jet.symbol(n.name(), {n.derivative().begin(), n.derivative().end()});
    });
    out.push_back(std::move(e));
  }
  return out;
}

VerificationReport verify_reduction(const SimilarityTransform& tr, const PDESystem& source,
                                    const PDESystem& target, std::uint64_t seed) {
  if (target.independent != tr.new_independent) {
    throw std::invalid_argument(tr.id + ": target " + target.id + " is in " + join(target.independent) +
                                ", transform introduces " + join(tr.new_independent));
  }
  VerificationReport r;
  try {
    const auto s = transformed_residuals(tr, source);
    const JetSpace jet(target.independent, target.dependent, std::max(source.order, target.order) + 1);
    Substitution back;
    for (std::size_t i = 0; i < tr.new_independent.size(); ++i) {
      back.bind(tr.new_independent[i], tr.independent_definitions[i]);
    }
    std::vector<Expr> t;
    for (const auto& e : target.residuals) t.push_back(expr::substitute(jet.to_jet(e), back));
    r = match(s, t, jet, seed, quadrature_environment(tr.quadratures));
  } catch (const ReductionFailure& e) {
    r.passed = false;
    r.message = e.what();
  }
  r.transform = tr.id;
  r.target = target.id;
  return r;
}

VerificationReport verify_reduction(const SimilarityTransform& tr, const PDESystem& source,
                                    const ReducedODE& target, std::uint64_t seed) {
  return verify_reduction(tr, source, target.system, seed);
}

Expr eliminate(const ReducedODE& system, const std::string& eliminated) {
  const auto& sys = system.system;
  if (sys.residuals.size() != 2 || sys.independent.size() != 1) {
    throw std::invalid_argument(system.id + ": elimination needs two equations in one independent variable");
  }
  const JetSpace jet(sys.independent, sys.dependent, 3);
  const std::string x = sys.independent.front();
  const std::string dx = jet.name(eliminated, {1});
  const Expr first = jet.to_jet(sys.residuals[0]);
  if (expr::contains_symbol(first, dx)) {
    throw ReductionFailure(system.id + ": first equation contains " + dx + ", " + eliminated +
                           " is not algebraic");
  }
  const Expr coeff = expr::normalize(expr::differentiate(first, eliminated));
  if (coeff.is_zero() || expr::contains_symbol(coeff, eliminated)) {
    throw ReductionFailure(system.id + ": first equation is not linear in " + eliminated);
  }
  Substitution zero;
  zero.bind(eliminated, 0);
  const Expr value = expr::normalize(-expr::substitute(first, zero) / coeff);
  const Expr slope = jet.total_derivative(value, 0);
  Substitution s;
  s.bind(eliminated, value);
  s.bind(dx, slope);
  return jet.from_jet(expr::substitute(jet.to_jet(sys.residuals[1]), s));
}

VerificationReport verify_elimination(const ReducedODE& system, const std::string& eliminated,
                                      const ReducedODE& target, std::uint64_t seed) {
  VerificationReport r;
  r.transform = "eliminate " + eliminated + " from " + system.id;
  r.target = target.id;
  try {
    const Expr e = eliminate(system, eliminated);
    const JetSpace jet(system.system.independent, system.system.dependent, 3);
    r = match({jet.to_jet(e)}, {jet.to_jet(target.system.residuals.front())}, jet, seed, {});
    r.transform = "eliminate " + eliminated + " from " + system.id;
    r.target = target.id;
  } catch (const ReductionFailure& e) {
    r.passed = false;
    r.message = e.what();
  }
  return r;
}

namespace {

ReducedODE from_residuals(std::string id, OdeTag tag, std::vector<std::string> dependent,
                          std::vector<const char*> residuals, std::string description, bool printed,
                          const Substitution& s = {}) {
  PDESystem sys{id, std::move(description), {"f"}, dependent, {}, {}, 1};
  int order = 1;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    sys.residuals.push_back(expr::substitute(expr::parse(residuals[i]), s));
  }
  if (residuals.size() == 1) {
    order = 2;
    sys.leading.push_back({dependent.front(), {2}});
  } else {
    for (const auto& d : dependent) sys.leading.push_back({d, {1}});
  }
  sys.order = order;
  sys.validate();
  return {std::move(id), tag, std::move(sys), std::nullopt, printed};
}

ReducedODE from_catalog(const std::string& id, const std::string& catalog_id, const Substitution& s = {}) {
  PDESystem sys = symmetry::catalog_system(catalog_id);
  sys.id = id;
  for (auto& r : sys.residuals) r = expr::substitute(r, s);
  return {id, OdeTag::SecondOrderScalar, std::move(sys), std::nullopt, true};
}

SimilarityTransform transform(std::string id, const char* f, std::vector<std::pair<const char*, const char*>> defs,
                              std::string target, const Substitution& s = {}) {
  SimilarityTransform tr;
  tr.id = std::move(id);
  tr.independent_definitions = {expr::substitute(expr::parse(f), s)};
  tr.new_dependent = {"w", "k"};
  for (const auto& [name, def] : defs) tr.dependent_definitions.emplace_back(name, expr::parse(def));
  tr.target = std::move(target);
  return tr;
}

Reduction finish(std::string id, SimilarityTransform tr, ReducedODE system, ReducedODE second,
                 std::uint64_t seed) {
  Reduction r{std::move(id), std::move(tr), std::move(system), std::move(second), {}, {}, {}};
  r.system_check = verify_reduction(r.transform, symmetry::catalog_system("cheng"), r.system, seed);
  r.elimination_check = verify_elimination(r.system, "k", r.second_order, seed);
  return r;
}

}  // namespace

Reduction reduce_travelling_wave(const Expr& c, std::uint64_t seed) {
  if (expr::normalize(c).is_zero()) {
    throw DegenerateReduction("travelling-wave speed c = 0: the second-order form divides by c");
  }
  Substitution s;
  if (!(c.is_symbol() && c.name() == "c")) s.bind("c", c);
  SimilarityTransform tr = transform("case1", "x - c*t", {{"u", "w(f)"}, {"v", "k(f)"}}, "case1-system", s);
  auto system = from_residuals("case1-system", OdeTag::FirstOrderSystem, {"w", "k"},
                               {"w'(f) + a*k(f)*w(f)", "c*k'(f) + b*w'(f)"}, "w' = -a k w, c k' = -b w'", true, s);
  auto second = from_catalog("case1-second-order", "travelling", s);
  return finish("case1", std::move(tr), std::move(system), std::move(second), seed);
}

Reduction reduce_scaling(ScalingVariant variant, std::uint64_t seed) {
  if (variant == ScalingVariant::A) {
    auto tr = transform("case2a", "t/x", {{"u", "w(f)/t"}, {"v", "k(f)/x"}}, "case2a-system");
    auto system = from_residuals("case2a-system", OdeTag::FirstOrderSystem, {"w", "k"},
                                 {"f*w'(f) - a*k(f)*w(f)", "k'(f) + b*w'(f)"}, "f w' = a k w, k' = -b w'", true);
    auto second = from_catalog("case2a-second-order", "scaling-a");
    return finish("case2a", std::move(tr), std::move(system), std::move(second), seed);
  }
  auto tr = transform("case2b", "t/x", {{"u", "w(f)/x"}, {"v", "k(f)/x"}}, "case2b-system");
  auto system = from_residuals("case2b-system", OdeTag::FirstOrderSystem, {"w", "k"},
                               {"f*w'(f) + w(f) - a*k(f)*w(f)", "k'(f) + b*(f*w'(f) + w(f))"},
                               "f w' + w = a k w, k' = -b (f w' + w)", true);
  auto second = from_catalog("case2b-second-order", "scaling-b");
  return finish("case2b", std::move(tr), std::move(system), std::move(second), seed);
}

Reduction reduce_general(const Expr& h, const Expr& g, GeneralVariant variant, std::uint64_t seed) {
  for (const auto& [fn, var] : {std::pair{h, "t"}, std::pair{g, "x"}}) {
    for (const auto& s : expr::free_symbols(fn)) {
      if (s != var) throw std::invalid_argument(std::string("function of ") + var + " expected, got " +
                                                expr::to_string(fn));
    }
  }
  std::vector<QuadratureAtom> atoms{{"h_a", "t", expr::normalize(1 / h)}, {"g_a", "x", expr::normalize(1 / g)}};
  if (variant == GeneralVariant::I) {
    auto tr = transform("general-I", "h_a(t) - g_a(x)", {{"u", "D[h_a,1](t)*w(f)"}, {"v", "D[g_a,1](x)*k(f)"}},
                        "general-I-system");
    tr.quadratures = atoms;
    auto system = from_residuals("general-I-system", OdeTag::FirstOrderSystem, {"w", "k"},
                                 {"w'(f) - a*w(f)*k(f)", "k'(f) + b*w'(f)"}, "w' = a w k, k' = -b w'", true);
    auto second = from_residuals("general-I-second-order", OdeTag::SecondOrderScalar, {"w"},
                                 {"w''(f)/(a*w(f)) - w'(f)^2/(a*w(f)^2) + b*w'(f)"},
                                 "w''/(a w) - w'^2/(a w^2) + b w' = 0", false);
    Reduction r = finish("general-I", std::move(tr), std::move(system), std::move(second), seed);
    r.notes.push_back("h_a, g_a are antiderivatives of 1/h, 1/g normalized to the value 1 at 1");
    return r;
  }

  const Expr kappa = expr::normalize(expr::differentiate(h, "t"));
  if (expr::contains_symbol(kappa, "t") || !expr::function_names(kappa).empty()) {
    throw DomainError("general-II needs h'(t) constant (the weight g_b is exp(-h' g_a)); h = " +
                      expr::to_string(h));
  }
  Substitution at_one;
  at_one.bind("t", 1);
  const Expr big_k = expr::normalize(expr::substitute(h, at_one) * expr::exp(-kappa));
  Substitution s;
  s.bind("kappa", kappa);
  s.bind("K", big_k);
  auto tr = transform("general-II", "h_a(t) - g_a(x)", {{"u", "exp(-kappa*g_a(x))*w(f)"}, {"v", "D[g_a,1](x)*k(f)"}},
                      "general-II-system");
  for (auto& [name, def] : tr.dependent_definitions) def = expr::substitute(def, s);
  tr.quadratures = atoms;
  auto system = from_residuals("general-II-system", OdeTag::FirstOrderSystem, {"w", "k"},
                               {"w'(f) + kappa*w(f) - a*w(f)*k(f)", "k'(f) + b*K*exp(kappa*f)*(kappa*w(f) + w'(f))"},
                               "w' + kappa w = a w k, k' = -b K exp(kappa f) (kappa w + w')", false, s);
  ReducedODE second{"general-II-second-order", OdeTag::SecondOrderScalar, {}, std::nullopt, false};
  second.system = PDESystem{second.id, "k eliminated", {"f"}, {"w"}, {}, {{"w", {2}}}, 2};
  second.system.residuals.push_back(eliminate(system, "k"));
  second.system.validate();
  Reduction r = finish("general-II", std::move(tr), std::move(system), std::move(second), seed);
  r.notes.push_back("g_b(x) = exp(-kappa g_a(x)) with kappa = h' = " + expr::to_string(kappa) +
                    "; K = h(1) exp(-kappa) = " + expr::to_string(big_k));
  r.notes.push_back("reduced system derived, not printed in the source");
  return r;
}

}  // namespace cheng::reduction
