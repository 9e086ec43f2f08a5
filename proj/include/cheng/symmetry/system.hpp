#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheng/expr/expression.hpp"

namespace cheng::symmetry {

using expr::Expr;

/// Derivative a residual is solved for when restricting to solutions.
struct LeadingDerivative {
  std::string variable;
  std::vector<int> index;  // one count per independent variable
};

/// A system of differential equations H^A = 0.  Residuals are written with
/// dependent variables as function atoms of all independent variables,
/// e.g. D[u,0,1](t,x) for u_x.  Symbols other than the independent
/// variables are parameters; function atoms other than the dependent
/// variables are arbitrary functions.
struct PDESystem {
  std::string id;
  std::string description;
  std::vector<std::string> independent;
  std::vector<std::string> dependent;
  std::vector<Expr> residuals;
  std::vector<LeadingDerivative> leading;
  int order = 1;

  Expr atom(const std::string& variable, std::vector<int> index = {}) const;
  std::vector<std::string> parameters() const;
  std::vector<std::string> arbitrary_functions() const;
  /// Throws std::invalid_argument if the declarations and residuals disagree.
  void validate() const;
};

/// Jet coordinates: u, u_t, u_x, u_tx, ... as plain symbols.  The
/// zeroth-order jet of u is the symbol u, so vector-field coefficients
/// written in the coordinates are already jet expressions.
class JetSpace {
 public:
  JetSpace(std::vector<std::string> independent, std::vector<std::string> dependent, int order);
  explicit JetSpace(const PDESystem& sys) : JetSpace(sys.independent, sys.dependent, sys.order) {}

  const std::vector<std::string>& independent() const { return independent_; }
  const std::vector<std::string>& dependent() const { return dependent_; }
  int order() const { return order_; }

  std::string name(const std::string& variable, const std::vector<int>& index) const;
  Expr symbol(const std::string& variable, const std::vector<int>& index) const;
  /// All multi-indices of total order k, in a fixed order.
  std::vector<std::vector<int>> indices(int k) const;

  /// Dependent-variable atoms to jet symbols.
  Expr to_jet(const Expr& e) const;
  /// Jet symbols back to atoms.
  Expr from_jet(const Expr& e) const;
  /// Total derivative D_i of a jet expression.
  Expr total_derivative(const Expr& e, std::size_t i) const;

 private:
  std::vector<std::string> independent_;
  std::vector<std::string> dependent_;
  int order_;
  std::map<std::string, std::pair<std::string, std::vector<int>>> jets_;
};

class ManifoldRestrictionError : public std::runtime_error {
 public:
  ManifoldRestrictionError(const std::string& what, std::vector<std::string> unsolved)
      : std::runtime_error(what), unsolved_(std::move(unsolved)) {}
  const std::vector<std::string>& unsolved() const { return unsolved_; }

 private:
  std::vector<std::string> unsolved_;
};

/// Solves each residual for its leading derivative (jet symbol -> jet
/// expression), substituting earlier solutions first.  Each residual must be
/// linear in its leading derivative.
std::map<std::string, Expr> solve_leading(const PDESystem& sys, const JetSpace& jet);

/// Replaces leading derivatives by their solutions until none remain.
Expr restrict_to_solutions(const Expr& jet_expr, const std::map<std::string, Expr>& solved);

}  // namespace cheng::symmetry
