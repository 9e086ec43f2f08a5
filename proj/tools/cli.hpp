#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cheng/solutions/grid.hpp"

namespace cheng::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kIndeterminate = 2;
inline constexpr int kUsage = 64;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirVariable = "CHENG_OUTPUT_DIR";

struct RunConfig {
  std::string command;
  std::string target;

  double a = 1.0;
  double b = 1.0;
  std::string c = "1";  // wave speed, or c(x) for space-dep
  double C0 = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;  // constant of the Euler-type solutions
  std::uint64_t seed = 42;

  // Function-atom instantiations, as expressions.
  std::string g;
  std::string h;
  std::string tau = "1";
  std::string lambda;

  // verify-symmetries
  std::string field;
  std::string system = "cheng";
  std::string only;

  // reduce
  std::string chart;
  int generator = 1;
  bool as_printed = false;

  // solve / report
  std::string form = "derived";
  bool check = false;
  bool report = false;
  std::string equation = "travelling-canonical";
  std::string variant = "travelling";
  std::optional<double> x0, y0, x1;  // unset: the target default
  std::string u;
  std::string v;
  std::string flow;
  double eps = 0.5;
  std::string method = "symbolic";

  solutions::GridSpec grid;
  double margin = solutions::kSingularMargin;
  double tolerance = 0.0;  // 0: the command default

  std::string out_dir;
  std::string format = "both";
};

/// Parses argv, runs the command, writes its report files and a summary to
/// `out`.  Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cheng::cli
