#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheng/odesolve/integrate.hpp"
#include "cheng/reduction/reduction.hpp"
#include "cheng/solutions/closed_form.hpp"
#include "cheng/symmetry/vector_field.hpp"

namespace cheng::solutions {

struct GridSpec {
  double t0 = 1.0, t1 = 2.0;
  std::size_t nt = 101;
  double x0 = 1.0, x1 = 2.0;
  std::size_t nx = 101;

  double t(std::size_t i) const;
  double x(std::size_t j) const;
  std::size_t size() const { return nt * nx; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nx + j; }
  /// Throws std::invalid_argument for fewer than 5 points per axis or an
  /// empty range.
  void validate() const;
};

/// (u, v) on a grid; invalid points are masked.
struct SampledField {
  GridSpec grid;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<char> valid;
};

inline constexpr double kSingularMargin = 0.1;

SampledField sample(const ClosedFormSolution& s, const GridSpec& grid, double margin = kSingularMargin);

class EmptyReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResidualReport {
  std::string source;
  std::string method;  // "symbolic" or "finite-difference"
  GridSpec grid;
  double a = 1.0;
  double b = 1.0;
  double max_res1 = 0.0;
  double max_res2 = 0.0;
  double max = 0.0;
  double rms = 0.0;
  std::size_t points = 0;
  std::size_t masked = 0;
  SampledField field;
  std::vector<double> res1;
  std::vector<double> res2;
  std::vector<std::string> warnings;
};

/// Residuals by symbolic differentiation, evaluated pointwise.
ResidualReport residual_report(const ClosedFormSolution& s, const GridSpec& grid, double margin = kSingularMargin);

/// Residuals by fourth-order finite differences with the grid spacing as
/// step (central inside, one-sided near the edges).  A point is masked if
/// any point of its stencils is.
ResidualReport residual_report(const SampledField& field, double a, double b, std::string source);

/// Maps a reduced-ODE trajectory back to (u, v) through the transform.
/// `components` names the trajectory components ("w", "k" or "w", "w_f");
/// a missing dependent is recovered from the first equation of `reduced`.
/// Grid points whose similarity variable is outside the trajectory are
/// masked.
SampledField lift(const odesolve::Trajectory& traj, const std::vector<std::string>& components,
                  const reduction::SimilarityTransform& tr, const reduction::ReducedODE& reduced,
                  const GridSpec& grid, const expr::Environment& env);

/// The image of a closed-form solution under exp(eps X): the field at
/// (t, x) is the flow of (t', x', u(t', x'), v(t', x')) where (t', x') flows
/// to (t, x).  X must not move t, x depending on u, v.
SampledField transport(const ClosedFormSolution& s, const symmetry::VectorField& vf, double eps,
                       const GridSpec& grid, double margin = kSingularMargin);

}  // namespace cheng::solutions
