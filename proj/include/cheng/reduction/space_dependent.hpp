#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cheng/reduction/reduction.hpp"

namespace cheng::reduction {

/// Substituting v = -u_x/(a u) into v_t = b u_x, compared with
/// (u_xt/u - u_x u_t/u^2) + c u_x = 0 for c = a b and for c = b/a.
struct EliminationCheck {
  Expr residual;  // atom form, u only
  bool matches_ab = false;
  bool matches_b_over_a = false;
};

EliminationCheck check_space_elimination(std::uint64_t seed = 42);

/// Whether the transformed source is an ODE in the new independent: the
/// residual divided by the coefficient of the highest jet depends on (t, x)
/// only through the similarity variable.
struct ClosureCheck {
  std::string transform;
  bool closes = false;
  Expr residual;  // jets of the new dependent, t, x
};

ClosureCheck check_closure(const SimilarityTransform& tr, const PDESystem& source, std::uint64_t seed = 42);

struct SpaceDependentReduction {
  PDESystem system;  // with c(x) instantiated
  EliminationCheck elimination;
  std::vector<symmetry::SymmetryReport> fields;  // c d/dx - c' u d/du, tau d/dt - tau' u d/du
  /// f_a = c_a(x) - tau_a(t), u = w_a(f_a) at c = tau = 1, against the ODE
  /// as printed and as derived.
  SimilarityTransform unit_transform;
  VerificationReport as_printed;
  VerificationReport derived;
  /// Same transform for the given c and tau, and the weighted form
  /// u = w_a(f_a)/(c(x) tau(t)).
  ClosureCheck printed_closure;
  ClosureCheck weighted_closure;
  std::vector<std::string> notes;
};

/// c_expr in x (an abstract atom c(x) is allowed); tau_expr in t.
SpaceDependentReduction reduce_space_dependent(const Expr& c_expr, const Expr& tau_expr, std::uint64_t seed = 42);

/// c'/s' - c/s: what remains of the equation for u = s(x)/c(x).
Expr stationary_constraint(const Expr& c_expr, const Expr& s_expr);

/// The equation with u = s(x)/c(x) substituted, atom form.
Expr stationary_residual(const Expr& c_expr, const Expr& s_expr);

}  // namespace cheng::reduction
