#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cheng/reduction/quadrature.hpp"
#include "cheng/symmetry/system.hpp"
#include "cheng/symmetry/vector_field.hpp"

namespace cheng::reduction {

using symmetry::PDESystem;
using symmetry::VectorField;

enum class OdeTag {
  RiccatiFirstOrder,
  EulerLinearFirstOrder,
  AbelFirstKind,
  AbelSecondKind,
  SecondOrderScalar,
  FirstOrderSystem,
  Unclassified,
};

const char* to_string(OdeTag tag);

/// Reduced equations.  The system holds the residuals in atom form
/// (dependent variables as atoms of the single independent variable).
/// Explicit first-order scalar equations also carry y' = rhs(x, y) in plain
/// symbols.
struct ReducedODE {
  std::string id;
  OdeTag tag = OdeTag::Unclassified;
  PDESystem system;
  std::optional<Expr> rhs;
  bool printed = true;  // false: derived here, not printed in the source

  const std::string& independent() const { return system.independent.front(); }
  const std::string& dependent() const { return system.dependent.front(); }
  std::string to_string() const;
};

/// y' = rhs(x, y).
ReducedODE first_order(std::string id, OdeTag tag, const std::string& x, const std::string& y, Expr rhs,
                       bool printed = true);

/// Change of variables.  New independents are given as expressions in the
/// source independents; old dependents in terms of the new independent
/// symbols, new dependent atoms of them, and the source independents.
struct SimilarityTransform {
  std::string id;
  std::vector<std::string> new_independent{"f"};
  std::vector<Expr> independent_definitions;
  std::vector<std::string> new_dependent;
  std::vector<std::pair<std::string, Expr>> dependent_definitions;
  std::vector<QuadratureAtom> quadratures;
  std::string target;

  /// Definition of an old dependent with the new independents replaced by
  /// their definitions.
  Expr lifted(const std::string& old_dependent) const;
  std::string to_string() const;
};

struct EquationMatch {
  std::size_t source = 0;
  std::optional<std::size_t> target;
  Expr multiplier;  // source residual = multiplier * target residual
  Expr leftover;    // when unmatched: source - target (paired by index)
};

struct VerificationReport {
  std::string transform;
  std::string target;
  bool passed = false;
  std::vector<EquationMatch> matches;
  std::string message;
};

class ReductionFailure : public std::runtime_error {
 public:
  ReductionFailure(const std::string& what, std::vector<std::string> leftover = {})
      : std::runtime_error(what), leftover_(std::move(leftover)) {}
  const std::vector<std::string>& leftover() const { return leftover_; }

 private:
  std::vector<std::string> leftover_;
};

class DegenerateReduction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Substitutes the transform into the source, rewrites in the new
/// variables, and checks that every source residual is a nonzero multiple
/// (free of derivatives) of a distinct target residual.
VerificationReport verify_reduction(const SimilarityTransform& tr, const PDESystem& source,
                                    const PDESystem& target, std::uint64_t seed = 42);
VerificationReport verify_reduction(const SimilarityTransform& tr, const PDESystem& source,
                                    const ReducedODE& target, std::uint64_t seed = 42);

/// s = multiplier * t with the multiplier free of derivative jets (first
/// order and up) and not identically zero.  Zero-tested with `env`.
std::optional<Expr> proportional(const Expr& s, const Expr& t, const symmetry::JetSpace& jet, std::uint64_t seed,
                                 const expr::Environment& env = {});

/// Transform substituted into the source, in jet symbols of the new
/// dependents (w, w_f, k, ...), with quadrature derivatives expanded.
std::vector<Expr> transformed_residuals(const SimilarityTransform& tr, const PDESystem& source);

/// Solves the first residual of a two-equation first-order system for
/// `eliminated` (it must be algebraic and linear in it) and substitutes the
/// solution into the second.  Returns the remaining residual, atom form.
Expr eliminate(const ReducedODE& system, const std::string& eliminated);

/// eliminate() compared with `target` up to a multiplier.
VerificationReport verify_elimination(const ReducedODE& system, const std::string& eliminated,
                                      const ReducedODE& target, std::uint64_t seed = 42);

struct Reduction {
  std::string id;
  SimilarityTransform transform;
  ReducedODE system;        // first-order system in w, k
  ReducedODE second_order;  // after eliminating k
  VerificationReport system_check;
  VerificationReport elimination_check;
  std::vector<std::string> notes;
};

/// f = x - c t, u = w(f), v = k(f).  c may be a number or a symbol; c = 0
/// throws DegenerateReduction.
Reduction reduce_travelling_wave(const Expr& c, std::uint64_t seed = 42);

enum class ScalingVariant { A, B };
/// A: f = t/x, u = w/t, v = k/x.   B: f = t/x, u = w/x, v = k/x.
Reduction reduce_scaling(ScalingVariant variant, std::uint64_t seed = 42);

enum class GeneralVariant { I, II };
/// I:  f = h_a(t) - g_a(x), u = h_a'(t) w(f), v = g_a'(x) k(f).
/// II: u = g_b(x) w(f) with g_b = exp(-kappa g_a(x)); requires h' = kappa
///     constant (DomainError otherwise).  The reduced system is derived.
Reduction reduce_general(const Expr& h, const Expr& g, GeneralVariant variant, std::uint64_t seed = 42);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cheng::reduction
