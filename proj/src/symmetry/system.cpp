#include "cheng/symmetry/system.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"

namespace cheng::symmetry {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void collect(const Expr& e, std::set<std::string>& atoms) {
  if (e.kind() == expr::Kind::Function) atoms.insert(e.name());
  for (const auto& c : e.children()) collect(c, atoms);
}

}  // namespace

Expr PDESystem::atom(const std::string& variable, std::vector<int> index) const {
  std::vector<Expr> args;
  for (const auto& s : independent) args.push_back(expr::symbol(s));
  return expr::function(variable, std::move(args), std::move(index));
}

std::vector<std::string> PDESystem::parameters() const {
  std::set<std::string> out;
  for (const auto& r : residuals) {
    for (const auto& s : expr::free_symbols(r)) {
      if (!contains(independent, s)) out.insert(s);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> PDESystem::arbitrary_functions() const {
  std::set<std::string> atoms;
  for (const auto& r : residuals) collect(r, atoms);
  std::vector<std::string> out;
  for (const auto& a : atoms) {
    if (!contains(dependent, a)) out.push_back(a);
  }
  return out;
}

void PDESystem::validate() const {
  if (residuals.size() != leading.size()) {
    throw std::invalid_argument(id + ": one leading derivative per residual is required");
  }
  if (order < 1 || order > 2) throw std::invalid_argument(id + ": order must be 1 or 2");
  for (const auto& l : leading) {
    if (!contains(dependent, l.variable) || l.index.size() != independent.size()) {
      throw std::invalid_argument(id + ": malformed leading derivative of " + l.variable);
    }
  }
  JetSpace jet(*this);
  for (const auto& r : residuals) jet.to_jet(r);
}

JetSpace::JetSpace(std::vector<std::string> independent, std::vector<std::string> dependent, int order)
    : independent_(std::move(independent)), dependent_(std::move(dependent)), order_(order) {
  for (const auto& d : dependent_) {
    for (int k = 0; k <= order_ + 1; ++k) {
      for (const auto& idx : indices(k)) jets_.emplace(name(d, idx), std::make_pair(d, idx));
    }
  }
}

std::string JetSpace::name(const std::string& variable, const std::vector<int>& index) const {
  std::string suffix;
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (int k = 0; k < index[i]; ++k) suffix += independent_[i];
  }
  return suffix.empty() ? variable : variable + "_" + suffix;
}

Expr JetSpace::symbol(const std::string& variable, const std::vector<int>& index) const {
  return expr::symbol(name(variable, index));
}

std::vector<std::vector<int>> JetSpace::indices(int k) const {
  std::vector<std::vector<int>> out;
  std::vector<int> current(independent_.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t slot, int left) {
    if (slot + 1 == current.size()) {
      current[slot] = left;
      out.push_back(current);
      return;
    }
    for (int j = left; j >= 0; --j) {
      current[slot] = j;
      rec(slot + 1, left - j);
    }
  };
  if (current.empty()) return k == 0 ? std::vector<std::vector<int>>{{}} : out;
  rec(0, k);
  return out;
}

Expr JetSpace::to_jet(const Expr& e) const {
  return expr::map_nodes(e, [this](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != expr::Kind::Function || !contains(dependent_, n.name())) return std::nullopt;
    const auto args = n.children();
    bool standard = args.size() == independent_.size();
    for (std::size_t i = 0; standard && i < args.size(); ++i) {
      standard = args[i].is_symbol() && args[i].name() == independent_[i];
    }
    if (!standard) {
      throw std::invalid_argument("dependent variable " + n.name() +
                                  " must be applied to the independent variables: " + expr::to_string(n));
    }
    return symbol(n.name(), {n.derivative().begin(), n.derivative().end()});
  });
}

Expr JetSpace::from_jet(const Expr& e) const {
  return expr::map_nodes(e, [this](const Expr& n) -> std::optional<Expr> {
    if (!n.is_symbol()) return std::nullopt;
    auto it = jets_.find(n.name());
    if (it == jets_.end()) return n;
    std::vector<Expr> args;
    for (const auto& s : independent_) args.push_back(expr::symbol(s));
    return expr::function(it->second.first, std::move(args), it->second.second);
  });
}

Expr JetSpace::total_derivative(const Expr& e, std::size_t i) const {
  return to_jet(expr::differentiate(from_jet(e), independent_.at(i)));
}

std::map<std::string, Expr> solve_leading(const PDESystem& sys, const JetSpace& jet) {
  std::map<std::string, Expr> solved;
  std::vector<std::string> unsolved;
  for (std::size_t k = 0; k < sys.residuals.size(); ++k) {
    const std::string lead = jet.name(sys.leading[k].variable, sys.leading[k].index);
    const Expr h = restrict_to_solutions(jet.to_jet(sys.residuals[k]), solved);
    const Expr coeff = expr::normalize(expr::differentiate(h, lead));
    if (coeff.is_zero() || expr::contains_symbol(coeff, lead)) {
      unsolved.push_back(lead);
      continue;
    }
    expr::Substitution at_zero;
    at_zero.bind(lead, 0);
    const Expr rest = expr::substitute(h, at_zero);
    solved.emplace(lead, expr::normalize(-rest / coeff));
  }
  if (!unsolved.empty()) {
    std::string list;
    for (const auto& u : unsolved) list += (list.empty() ? "" : ", ") + u;
    throw ManifoldRestrictionError(sys.id + ": cannot solve for leading derivatives " + list, unsolved);
  }
  return solved;
}

Expr restrict_to_solutions(const Expr& jet_expr, const std::map<std::string, Expr>& solved) {
  if (solved.empty()) return jet_expr;
  expr::Substitution s;
  for (const auto& [k, v] : solved) s.bind(k, v);
  Expr out = jet_expr;
  for (std::size_t pass = 0; pass <= solved.size(); ++pass) {
    const bool any = std::any_of(solved.begin(), solved.end(),
                                 [&](const auto& kv) { return expr::contains_symbol(out, kv.first); });
    if (!any) return out;
    out = expr::substitute(out, s);
  }
  throw ManifoldRestrictionError("leading derivatives depend on each other cyclically", {});
}

}  // namespace cheng::symmetry
