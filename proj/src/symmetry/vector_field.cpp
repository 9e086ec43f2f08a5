#include "cheng/symmetry/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"

namespace cheng::symmetry {

VectorField::VectorField(std::string label, std::vector<std::pair<std::string, Expr>> components)
    : label_(std::move(label)) {
  for (auto& [coord, coeff] : components) {
    auto it = std::find_if(components_.begin(), components_.end(),
                           [&](const auto& c) { return c.first == coord; });
    if (it != components_.end()) throw std::invalid_argument("coordinate " + coord + " appears twice");
    components_.emplace_back(coord, std::move(coeff));
  }
}

VectorField VectorField::parse(std::string_view text, std::string label) {
  return VectorField(label.empty() ? std::string(text) : std::move(label), expr::parse_vector_field(text));
}

std::vector<std::string> VectorField::coordinates() const {
  std::vector<std::string> out;
  for (const auto& [c, e] : components_) out.push_back(c);
  return out;
}

Expr VectorField::coefficient(const std::string& coordinate) const {
  for (const auto& [c, e] : components_) {
    if (c == coordinate) return e;
  }
  return 0;
}

VectorField VectorField::substituted(const expr::Substitution& s) const {
  std::vector<std::pair<std::string, Expr>> out;
  for (const auto& [c, e] : components_) out.emplace_back(c, expr::substitute(e, s));
  return VectorField(label_, std::move(out));
}

std::vector<std::string> VectorField::arbitrary_functions() const {
  std::set<std::string> out;
  for (const auto& [c, e] : components_) {
    for (const auto& f : expr::function_names(e)) out.insert(f);
  }
  return {out.begin(), out.end()};
}

std::string VectorField::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [c, e] : components_) {
    if (e.is_zero()) continue;
    auto [k, rest] = expr::split_coefficient(e);
    std::string coeff;
    if (!first) os << (k < 0 ? " - " : " + ");
    const Expr shown = first ? e : expr::product({Expr(expr::Rational(abs(k))), rest});
    if (shown.is_one()) {
      coeff = "";
    } else if (first && shown == Expr(-1)) {
      coeff = "-";
    } else {
      const std::string s = expr::to_string(shown);
      coeff = shown.kind() == expr::Kind::Sum ? "(" + s + ")*" : s + "*";
    }
    os << coeff << "d/d" << c;
    first = false;
  }
  return first ? "0" : os.str();
}

VectorField operator+(const VectorField& lhs, const VectorField& rhs) {
  std::vector<std::pair<std::string, Expr>> out = lhs.components();
  for (const auto& [c, e] : rhs.components()) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == c; });
    if (it == out.end()) {
      out.emplace_back(c, e);
    } else {
      it->second = it->second + e;
    }
  }
  return VectorField(lhs.label() + " + " + rhs.label(), std::move(out));
}

VectorField operator*(const Expr& factor, const VectorField& field) {
  std::vector<std::pair<std::string, Expr>> out;
  for (const auto& [c, e] : field.components()) out.emplace_back(c, factor * e);
  return VectorField(expr::to_string(factor) + "*(" + field.label() + ")", std::move(out));
}

Expr ProlongedField::coefficient(const std::string& jet_name) const {
  auto it = coefficients.find(jet_name);
  return it == coefficients.end() ? Expr(0) : it->second;
}

ProlongedField prolong(const VectorField& vf, int order, const PDESystem& sys) {
  if (order < 1 || order > 2) {
    throw UnsupportedOrderError("prolongation order " + std::to_string(order) + " not supported (1 or 2)");
  }
  for (const auto& c : vf.coordinates()) {
    const bool known = std::find(sys.independent.begin(), sys.independent.end(), c) != sys.independent.end() ||
                       std::find(sys.dependent.begin(), sys.dependent.end(), c) != sys.dependent.end();
    if (!known) throw std::invalid_argument("field coordinate " + c + " is not a variable of " + sys.id);
  }
  const JetSpace jet(sys.independent, sys.dependent, std::max(order, sys.order));
  const std::size_t n = sys.independent.size();
  std::vector<Expr> xi;
  for (const auto& s : sys.independent) xi.push_back(vf.coefficient(s));
  // dxi[i][j] = D_i xi^j
  std::vector<std::vector<Expr>> dxi(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dxi[i][j] = jet.total_derivative(xi[j], i);
  }
  ProlongedField out{vf, order, {}};
  for (const auto& dep : sys.dependent) {
    out.coefficients[jet.name(dep, std::vector<int>(n, 0))] = vf.coefficient(dep);
    for (int k = 1; k <= order; ++k) {
      for (const auto& alpha : jet.indices(k)) {
        const auto i = static_cast<std::size_t>(
            std::find_if(alpha.begin(), alpha.end(), [](int a) { return a > 0; }) - alpha.begin());
        std::vector<int> beta = alpha;
        --beta[i];
        std::vector<Expr> terms{jet.total_derivative(out.coefficients.at(jet.name(dep, beta)), i)};
        for (std::size_t j = 0; j < n; ++j) {
          std::vector<int> bj = beta;
          ++bj[j];
          terms.push_back(-(jet.symbol(dep, bj) * dxi[i][j]));
        }
        out.coefficients[jet.name(dep, alpha)] = expr::normalize(expr::sum(std::move(terms)));
      }
    }
  }
  return out;
}

std::vector<Expr> symmetry_residual(const PDESystem& sys, const VectorField& vf) {
  const JetSpace jet(sys);
  const ProlongedField pf = prolong(vf, sys.order, sys);
  const auto solved = solve_leading(sys, jet);
  std::vector<Expr> out;
  for (const auto& h : sys.residuals) {
    const Expr hj = jet.to_jet(h);
    std::vector<Expr> terms;
    for (const auto& s : sys.independent) {
      const Expr c = vf.coefficient(s);
      if (!c.is_zero()) terms.push_back(c * expr::differentiate(hj, s));
    }
    for (const auto& [name, eta] : pf.coefficients) {
      if (eta.is_zero() || !expr::contains_symbol(hj, name)) continue;
      terms.push_back(eta * expr::differentiate(hj, name));
    }
    out.push_back(expr::normalize(restrict_to_solutions(expr::sum(std::move(terms)), solved)));
  }
  return out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  std::vector<std::string> coords = x.coordinates();
  for (const auto& c : y.coordinates()) {
    if (std::find(coords.begin(), coords.end(), c) == coords.end()) coords.push_back(c);
  }
  std::vector<std::pair<std::string, Expr>> out;
  for (const auto& k : coords) {
    std::vector<Expr> terms;
    for (const auto& j : coords) {
      terms.push_back(x.coefficient(j) * expr::differentiate(y.coefficient(k), j));
      terms.push_back(-(y.coefficient(j) * expr::differentiate(x.coefficient(k), j)));
    }
    out.emplace_back(k, expr::normalize(expr::sum(std::move(terms))));
  }
  return VectorField("[" + x.label() + ", " + y.label() + "]", std::move(out));
}

const std::vector<std::string>& atom_basis() {
  static const std::vector<std::string> basis{"1", "s", "s^2", "exp(s)"};
  return basis;
}

SymmetryReport check_symmetry(const PDESystem& sys, const VectorField& vf, std::uint64_t seed) {
  SymmetryReport report;
  report.system = sys.id;
  report.field = vf.label();
  report.residuals = symmetry_residual(sys, vf);
  report.symbolic = std::all_of(report.residuals.begin(), report.residuals.end(),
                                [](const Expr& e) { return e.is_zero(); });
  report.equation_zero.assign(report.residuals.size(), true);
  if (report.symbolic) {
    report.passed = true;
    return report;
  }
  std::set<std::string> atom_set;
  for (const auto& r : report.residuals) {
    for (const auto& f : expr::function_names(r)) atom_set.insert(f);
  }
  const std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  const auto& basis = atom_basis();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < atoms.size(); ++i) combos *= basis.size();
  for (std::size_t code = 0; code < combos; ++code) {
    AtomAssignment a;
    expr::Substitution s;
    std::size_t rest = code;
    for (const auto& atom : atoms) {
      const std::string& body = basis[rest % basis.size()];
      rest /= basis.size();
      a.bodies[atom] = body;
      s.bind_function(atom, {"s"}, expr::parse(body));
    }
    a.zero = true;
    for (std::size_t e = 0; e < report.residuals.size(); ++e) {
      Expr inst = expr::normalize(expr::substitute(report.residuals[e], s));
      const auto z = expr::zero_test(inst, seed);
      a.residuals.push_back(inst);
      a.max_abs = std::max(a.max_abs, z.max_abs);
      if (!z.zero) {
        a.zero = false;
        report.equation_zero[e] = false;
      }
    }
    report.max_abs = std::max(report.max_abs, a.max_abs);
    report.assignments.push_back(std::move(a));
  }
  report.passed = std::all_of(report.equation_zero.begin(), report.equation_zero.end(), [](bool b) { return b; });
  return report;
}

FlowResult group_flow(const VectorField& vf, double epsilon, const Point& point, const expr::Environment& env) {
  std::vector<std::string> coords;
  for (const auto& [k, v] : point) coords.push_back(k);
  for (const auto& c : vf.coordinates()) {
    if (!point.contains(c)) throw std::invalid_argument("group_flow: point has no coordinate " + c);
  }
  FlowResult result{point, true};
  if (epsilon == 0.0) return result;

  // Closed form for decoupled affine coefficients.
  std::vector<std::pair<double, double>> affine;  // (alpha, beta)
  for (const auto& k : coords) {
    const Expr c = vf.coefficient(k);
    bool ok = true;
    for (const auto& j : coords) {
      const Expr d = expr::normalize(expr::differentiate(c, j));
      if (j == k) {
        ok = ok && expr::normalize(expr::differentiate(d, k)).is_zero();
      } else {
        ok = ok && d.is_zero();
      }
      if (!ok) break;
    }
    if (ok) {
      try {
        expr::Substitution at_zero;
        at_zero.bind(k, 0);
        affine.emplace_back(expr::evaluate(expr::substitute(c, at_zero), env),
                            expr::evaluate(expr::normalize(expr::differentiate(c, k)), env));
      } catch (const expr::EvaluationError&) {
        ok = false;
      }
    }
    if (!ok) {
      affine.clear();
      result.exact = false;
      break;
    }
  }
  if (result.exact) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto [alpha, beta] = affine[i];
      const double y0 = point.at(coords[i]);
      result.point[coords[i]] =
          beta == 0.0 ? y0 + alpha * epsilon : y0 + (y0 * beta + alpha) * std::expm1(beta * epsilon) / beta;
    }
    return result;
  }

  std::vector<expr::CompiledExpr> programs;
  for (const auto& k : coords) programs.emplace_back(vf.coefficient(k), coords, env);
  odesolve::System f = [&programs](double, std::span<const double> y, std::span<double> dy) {
    for (std::size_t i = 0; i < programs.size(); ++i) {
      try {
        dy[i] = programs[i](y);
      } catch (const expr::EvaluationError&) {
        dy[i] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  std::vector<double> y0;
  for (const auto& k : coords) y0.push_back(point.at(k));
  auto traj = odesolve::integrate(f, 0.0, y0, epsilon);
  if (traj.status != odesolve::Status::Completed) {
    throw FlowError("group_flow: " + traj.message, std::move(traj));
  }
  for (std::size_t i = 0; i < coords.size(); ++i) result.point[coords[i]] = traj.y.back()[i];
  return result;
}

}  // namespace cheng::symmetry
