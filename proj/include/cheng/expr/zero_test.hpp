#pragma once

#include <cstdint>
#include <stdexcept>

#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/expression.hpp"

namespace cheng::expr {

class IndeterminateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ZeroTestResult {
  bool zero = false;
  /// normalize() reached literal 0; no sampling was needed.
  bool symbolic = false;
  /// Largest |value| over the sampled points (0 when symbolic).
  double max_abs = 0.0;
  int points = 0;
};

/// Probabilistic zero test.  normalize() first; otherwise evaluate at 20
/// seeded points with every free symbol drawn from [0.5, 2].  Symbols bound
/// in `fixed` keep their values.  Unbound function atoms are replaced by
/// seeded smooth functions (sums of exponentials), consistently with their
/// derivatives.  A draw that hits a singularity is redrawn, up to 100 times.
/// Throws IndeterminateError if no point could be evaluated.
ZeroTestResult zero_test(const Expr& e, std::uint64_t seed, const Environment& fixed = {});

inline bool is_zero(const Expr& e, std::uint64_t seed) { return zero_test(e, seed).zero; }

inline constexpr double kZeroTolerance = 1e-9;
inline constexpr int kZeroTestPoints = 20;
inline constexpr int kZeroTestRedraws = 100;

/// Deterministic uniform double in [0, 1) from a 64-bit engine output.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace cheng::expr
