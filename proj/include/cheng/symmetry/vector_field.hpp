#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/evaluate.hpp"
#include "cheng/odesolve/integrate.hpp"
#include "cheng/symmetry/system.hpp"

namespace cheng::symmetry {

/// Infinitesimal generator  sum_k coeff_k d/d(coord_k).
class VectorField {
 public:
  VectorField() = default;
  VectorField(std::string label, std::vector<std::pair<std::string, Expr>> components);
  /// Parses `coeff d/dX + ...` (see expr::parse_vector_field).
  static VectorField parse(std::string_view text, std::string label = {});

  const std::string& label() const { return label_; }
  const std::vector<std::pair<std::string, Expr>>& components() const { return components_; }
  std::vector<std::string> coordinates() const;
  /// Zero for coordinates the field does not mention.
  Expr coefficient(const std::string& coordinate) const;

  VectorField substituted(const expr::Substitution& s) const;
  /// Function atoms in the coefficients whose arguments are coordinates.
  std::vector<std::string> arbitrary_functions() const;
  std::string to_string() const;

 private:
  std::string label_;
  std::vector<std::pair<std::string, Expr>> components_;
};

VectorField operator+(const VectorField& lhs, const VectorField& rhs);
VectorField operator*(const Expr& factor, const VectorField& field);

/// The field extended to derivative coordinates, keyed by jet symbol name
/// (zeroth order included).
struct ProlongedField {
  VectorField base;
  int order = 0;
  std::map<std::string, Expr> coefficients;

  Expr coefficient(const std::string& jet_name) const;
};

class UnsupportedOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Total-derivative recursion
///   eta^A_{alpha + e_i} = D_i eta^A_alpha - sum_j u^A_{alpha + e_j} D_i xi^j.
/// order must be 1 or 2.
ProlongedField prolong(const VectorField& vf, int order, const PDESystem& sys);

/// L(H^A) for each residual, restricted to solutions and normalized.
std::vector<Expr> symmetry_residual(const PDESystem& sys, const VectorField& vf);

/// Commutator [X, Y] with normalized coefficients.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

struct AtomAssignment {
  std::map<std::string, std::string> bodies;  // atom -> basis function of s
  std::vector<Expr> residuals;
  bool zero = false;
  double max_abs = 0.0;
};

struct SymmetryReport {
  std::string system;
  std::string field;
  std::vector<Expr> residuals;  // symbolic in any arbitrary functions
  std::vector<bool> equation_zero;
  bool symbolic = false;  // zero identically, no sampling needed
  std::vector<AtomAssignment> assignments;
  bool passed = false;
  double max_abs = 0.0;
};

/// The functions arbitrary atoms are instantiated with: 1, s, s^2, exp(s).
const std::vector<std::string>& atom_basis();

/// symmetry_residual + zero test.  Arbitrary functions (in the system or
/// the field) that do not cancel symbolically are instantiated with every
/// combination of atom_basis(); all must vanish.  expr::IndeterminateError
/// propagates.
SymmetryReport check_symmetry(const PDESystem& sys, const VectorField& vf, std::uint64_t seed);

class FlowError : public std::runtime_error {
 public:
  FlowError(const std::string& what, odesolve::Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const odesolve::Trajectory& partial() const { return partial_; }

 private:
  odesolve::Trajectory partial_;
};

using Point = std::map<std::string, double>;

struct FlowResult {
  Point point;
  bool exact = false;  // closed-form affine flow, no integration
};

/// exp(epsilon X) applied to `point`.  Closed form when every coefficient is
/// alpha + beta * (own coordinate) with constant alpha, beta; otherwise the
/// flow ODE is integrated.  `env` binds parameters and arbitrary functions.
FlowResult group_flow(const VectorField& vf, double epsilon, const Point& point,
                      const expr::Environment& env = {});

}  // namespace cheng::symmetry
