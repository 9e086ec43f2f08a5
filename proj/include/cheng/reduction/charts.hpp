#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cheng/reduction/reduction.hpp"

namespace cheng::reduction {

enum class ChartKind { Canonical, DifferentialInvariants };

const char* to_string(ChartKind kind);

/// Coordinates (n, m) on the first jet of a second-order ODE in (f, w):
/// n = N(f, w), m = M(f, w, w_f), with the inverse w(f, n, m), w_f(f, n, m).
struct CoordinateChart {
  std::string id;
  ChartKind kind = ChartKind::Canonical;
  std::string system;     // catalog id of the second-order ODE
  VectorField generator;  // symmetry the chart is adapted to
  int generator_index = 1;
  std::string new_independent = "n";
  std::string new_dependent = "m";
  Expr n;
  Expr m;
  std::optional<Expr> w_inverse;
  std::optional<Expr> w_f_inverse;
  /// Printed form replaced by one that reduces the equation.
  bool corrected = false;
  /// Printed form kept for the record; expected to fail.
  bool as_printed = false;
  std::string note;
  /// Expected reduced equation (id in reduced_targets()), empty if none.
  std::string target;
  /// Structural class the reduction is claimed to have.
  OdeTag expected_tag = OdeTag::Unclassified;
};

const std::vector<CoordinateChart>& charts();
/// Lookup by reduction id ("case1", "case2a", "case2b", "space-dep"), kind
/// and generator index; the working (possibly corrected) chart.
const CoordinateChart& chart(std::string_view reduction, ChartKind kind, int generator_index);
const CoordinateChart& chart(std::string_view id);

/// Printed (or, where the source only names them, derived) first-order
/// reductions, explicit right-hand sides.
const std::vector<ReducedODE>& reduced_targets();
const ReducedODE& reduced_target(std::string_view id);

struct ChartCheck {
  bool generator_is_symmetry = false;
  bool n_invariant = false;
  bool m_invariant = false;
  bool jacobian_nonsingular = false;
  bool inverse_consistent = false;
};

/// Checks canonical_reduce relies on, reported rather than thrown.
ChartCheck check_chart(const PDESystem& ode, const CoordinateChart& chart, std::uint64_t seed = 42);

/// Rewrites the ODE in the chart: m' = D_f M / D_f N with w_ff taken from
/// the ODE, then (w, w_f) replaced by the inverse chart.  Throws
/// ReductionFailure if f survives (leftover {"f"}), the Jacobian in
/// (w, w_f) is singular, or the generator is not a symmetry.  The result is
/// tagged structurally (classify()).
ReducedODE canonical_reduce(const PDESystem& ode, const VectorField& vf, const CoordinateChart& chart,
                            std::uint64_t seed = 42);

/// Structural tag of y' = rhs(x, y):
///   rhs rational with y in the denominator  -> AbelSecondKind
///   cubic polynomial in y                   -> AbelFirstKind
///   quadratic                               -> RiccatiFirstOrder
///   linear with y-coefficient c/x           -> EulerLinearFirstOrder
OdeTag classify(const Expr& rhs, const std::string& x, const std::string& y);

struct Comparison {
  bool equal = false;
  bool same_tag = false;
  Expr difference;  // derived - printed, normalized
};

Comparison compare(const ReducedODE& derived, const ReducedODE& printed, std::uint64_t seed = 42);

}  // namespace cheng::reduction
