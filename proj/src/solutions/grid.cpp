#include "cheng/solutions/grid.hpp"

#include <algorithm>
#include <cmath>

#include "cheng/expr/calculus.hpp"
#include "cheng/expr/normalize.hpp"

namespace cheng::solutions {

using expr::CompiledExpr;

double GridSpec::t(std::size_t i) const {
  return nt == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(nt - 1);
}

double GridSpec::x(std::size_t j) const {
  return nx == 1 ? x0 : x0 + (x1 - x0) * static_cast<double>(j) / static_cast<double>(nx - 1);
}

void GridSpec::validate() const {
  if (nt < 5 || nx < 5) throw std::invalid_argument("grid needs at least 5 points per axis");
  if (!(t1 > t0) || !(x1 > x0)) throw std::invalid_argument("grid ranges must be increasing");
}

namespace {

// Neumaier compensated sum.
class Sum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class Fn>
bool guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const expr::EvaluationError&) {
    return false;
  } catch (const reduction::QuadratureDomainError&) {
    return false;
  }
}

struct Compiled {
  CompiledExpr u, v;
  std::vector<CompiledExpr> singular;
};

Compiled compile(const ClosedFormSolution& s) {
  const auto env = s.environment();
  const std::vector<std::string> slots{"t", "x"};
  Compiled c{CompiledExpr(s.u, slots, env), CompiledExpr(s.v, slots, env), {}};
  for (const auto& d : s.singular) c.singular.emplace_back(d, slots, env);
  return c;
}

bool evaluate_point(const Compiled& c, double t, double x, double margin, double& u, double& v) {
  return guarded([&] {
    const double in[2] = {t, x};
    for (const auto& d : c.singular) {
      if (!(std::abs(d(in)) >= margin)) return false;
    }
    u = c.u(in);
    v = c.v(in);
    return std::isfinite(u) && std::isfinite(v);
  });
}

void finish(ResidualReport& r) {
  Sum squares;
  for (std::size_t k = 0; k < r.res1.size(); ++k) {
    if (!r.field.valid[k]) {
      ++r.masked;
      continue;
    }
    ++r.points;
    r.max_res1 = std::max(r.max_res1, std::abs(r.res1[k]));
    r.max_res2 = std::max(r.max_res2, std::abs(r.res2[k]));
    squares.add(r.res1[k] * r.res1[k]);
    squares.add(r.res2[k] * r.res2[k]);
  }
  if (r.points == 0) throw EmptyReportError(r.source + ": every grid point is masked");
  r.max = std::max(r.max_res1, r.max_res2);
  r.rms = std::sqrt(squares.value() / static_cast<double>(2 * r.points));
}

// Fourth-order first derivative of samples along one axis at position k of n.
bool derivative(std::size_t k, std::size_t n, double h, const auto& value, const auto& ok, double& out) {
  auto all = [&](std::size_t from) {
    for (std::size_t m = from; m < from + 5; ++m) {
      if (!ok(m)) return false;
    }
    return true;
  };
  if (k >= 2 && k + 2 < n) {
    if (!all(k - 2)) return false;
    out = (value(k - 2) - 8 * value(k - 1) + 8 * value(k + 1) - value(k + 2)) / (12 * h);
  } else if (k == 0) {
    if (!all(0)) return false;
    out = (-25 * value(0) + 48 * value(1) - 36 * value(2) + 16 * value(3) - 3 * value(4)) / (12 * h);
  } else if (k == 1) {
    if (!all(0)) return false;
    out = (-3 * value(0) - 10 * value(1) + 18 * value(2) - 6 * value(3) + value(4)) / (12 * h);
  } else if (k + 1 == n) {
    if (!all(n - 5)) return false;
    out = (25 * value(n - 1) - 48 * value(n - 2) + 36 * value(n - 3) - 16 * value(n - 4) + 3 * value(n - 5)) /
          (12 * h);
  } else {
    if (!all(n - 5)) return false;
    out = (3 * value(n - 1) + 10 * value(n - 2) - 18 * value(n - 3) + 6 * value(n - 4) - value(n - 5)) / (12 * h);
  }
  return true;
}

}  // namespace

SampledField sample(const ClosedFormSolution& s, const GridSpec& grid, double margin) {
  grid.validate();
  const Compiled c = compile(s);
  SampledField f{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()),
                 std::vector<char>(grid.size(), 0)};
  for (std::size_t i = 0; i < grid.nt; ++i) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const std::size_t k = grid.index(i, j);
      f.valid[k] = evaluate_point(c, grid.t(i), grid.x(j), margin, f.u[k], f.v[k]);
    }
  }
  return f;
}

ResidualReport residual_report(const ClosedFormSolution& s, const GridSpec& grid, double margin) {
  ResidualReport r;
  r.source = s.id + " (" + to_string(s.form) + ")";
  r.method = "symbolic";
  r.grid = grid;
  r.a = s.parameters.a;
  r.b = s.parameters.b;
  r.warnings = s.warnings;
  r.field = sample(s, grid, margin);
  const auto [e1, e2] = cheng_residuals(s);
  const auto env = s.environment();
  const CompiledExpr c1(e1, {"t", "x"}, env), c2(e2, {"t", "x"}, env);
  r.res1.assign(grid.size(), 0.0);
  r.res2.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.nt; ++i) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const std::size_t k = grid.index(i, j);
      if (!r.field.valid[k]) continue;
      r.field.valid[k] = guarded([&] {
        const double in[2] = {grid.t(i), grid.x(j)};
        r.res1[k] = c1(in);
        r.res2[k] = c2(in);
        return std::isfinite(r.res1[k]) && std::isfinite(r.res2[k]);
      });
    }
  }
  finish(r);
  return r;
}

ResidualReport residual_report(const SampledField& field, double a, double b, std::string source) {
  const GridSpec& g = field.grid;
  g.validate();
  ResidualReport r;
  r.source = std::move(source);
  r.method = "finite-difference";
  r.grid = g;
  r.a = a;
  r.b = b;
  r.field = field;
  r.res1.assign(g.size(), 0.0);
  r.res2.assign(g.size(), 0.0);
  const double ht = (g.t1 - g.t0) / static_cast<double>(g.nt - 1);
  const double hx = (g.x1 - g.x0) / static_cast<double>(g.nx - 1);
  for (std::size_t i = 0; i < g.nt; ++i) {
    for (std::size_t j = 0; j < g.nx; ++j) {
      const std::size_t k = g.index(i, j);
      if (!field.valid[k]) continue;
      double ux = 0, vt = 0;
      const bool ok =
          derivative(j, g.nx, hx, [&](std::size_t m) { return field.u[g.index(i, m)]; },
                     [&](std::size_t m) { return field.valid[g.index(i, m)] != 0; }, ux) &&
          derivative(i, g.nt, ht, [&](std::size_t m) { return field.v[g.index(m, j)]; },
                     [&](std::size_t m) { return field.valid[g.index(m, j)] != 0; }, vt);
      if (!ok) {
        r.field.valid[k] = 0;
        continue;
      }
      r.res1[k] = ux + a * field.u[k] * field.v[k];
      r.res2[k] = vt - b * ux;
    }
  }
  finish(r);
  return r;
}

SampledField lift(const odesolve::Trajectory& traj, const std::vector<std::string>& components,
                  const reduction::SimilarityTransform& tr, const reduction::ReducedODE& reduced,
                  const GridSpec& grid, const expr::Environment& env) {
  grid.validate();
  if (tr.new_independent.size() != 1) throw std::invalid_argument(tr.id + ": lift needs one new independent");
  if (components.size() != traj.dimension()) {
    throw std::invalid_argument("trajectory has " + std::to_string(traj.dimension()) + " components, " +
                                std::to_string(components.size()) + " names given");
  }
  const std::string& fvar = tr.new_independent.front();
  auto position = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(components.begin(), components.end(), name);
    if (it == components.end()) return std::nullopt;
    return static_cast<std::size_t>(it - components.begin());
  };

  // Values of each new dependent as compiled expressions of (f, components).
  std::vector<std::string> slots{fvar};
  for (const auto& c : components) slots.push_back(c);
  std::map<std::string, CompiledExpr> value_of;
  const symmetry::JetSpace jet(reduced.system.independent, reduced.system.dependent, 2);
  for (const auto& dep : tr.new_dependent) {
    if (position(dep)) {
      value_of.emplace(dep, CompiledExpr(expr::symbol(dep), slots, env));
      continue;
    }
    // Solve the first equation for the missing dependent.
    const Expr first = jet.to_jet(reduced.system.residuals.front());
    const Expr coeff = expr::normalize(expr::differentiate(first, dep));
    if (coeff.is_zero() || expr::contains_symbol(coeff, dep)) {
      throw std::invalid_argument(tr.id + ": cannot recover " + dep + " from " + reduced.id);
    }
    expr::Substitution zero;
    zero.bind(dep, 0);
    const Expr solved = expr::normalize(-expr::substitute(first, zero) / coeff);
    value_of.emplace(dep, CompiledExpr(solved, slots, env));
  }

  SampledField out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()),
                   std::vector<char>(grid.size(), 0)};
  const CompiledExpr big_f(tr.independent_definitions.front(), {"t", "x"}, env);
  // Dependent definitions with the atoms w(F) read from a per-point table.
  auto current = std::make_shared<std::map<std::string, double>>();
  expr::Environment lifted_env = env;
  for (const auto& dep : tr.new_dependent) {
    lifted_env.set_function(dep, [current, dep](std::span<const double>, std::span<const int> d) {
      if (!d.empty() && d[0] != 0) throw std::invalid_argument("lift: derivative of " + dep + " in a definition");
      return current->at(dep);
    });
  }
  lifted_env = reduction::quadrature_environment(tr.quadratures, lifted_env);
  const CompiledExpr u(tr.lifted("u"), {"t", "x"}, lifted_env);
  const CompiledExpr v(tr.lifted("v"), {"t", "x"}, lifted_env);
  for (std::size_t i = 0; i < grid.nt; ++i) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const std::size_t k = grid.index(i, j);
      out.valid[k] = guarded([&] {
        const double tx[2] = {grid.t(i), grid.x(j)};
        const double f = big_f(tx);
        if (!traj.covers(f)) return false;
        std::vector<double> in{f};
        for (double y : traj.at(f)) in.push_back(y);
        for (const auto& [dep, c] : value_of) (*current)[dep] = c(in);
        out.u[k] = u(tx);
        out.v[k] = v(tx);
        return std::isfinite(out.u[k]) && std::isfinite(out.v[k]);
      });
    }
  }
  return out;
}

SampledField transport(const ClosedFormSolution& s, const symmetry::VectorField& vf, double eps,
                       const GridSpec& grid, double margin) {
  grid.validate();
  for (const char* coord : {"t", "x"}) {
    const Expr xi = vf.coefficient(coord);
    if (expr::contains_symbol(xi, "u") || expr::contains_symbol(xi, "v")) {
      throw std::invalid_argument(vf.label() + ": the " + coord + " component depends on u or v");
    }
  }
  const Compiled c = compile(s);
  const auto env = s.environment();
  SampledField out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()),
                   std::vector<char>(grid.size(), 0)};
  for (std::size_t i = 0; i < grid.nt; ++i) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const std::size_t k = grid.index(i, j);
      try {
        const auto back = symmetry::group_flow(vf, -eps, {{"t", grid.t(i)}, {"x", grid.x(j)}, {"u", 0.0}, {"v", 0.0}}, env);
        const double t = back.point.at("t"), x = back.point.at("x");
        double u = 0, v = 0;
        if (!evaluate_point(c, t, x, margin, u, v)) continue;
        const auto fwd = symmetry::group_flow(vf, eps, {{"t", t}, {"x", x}, {"u", u}, {"v", v}}, env);
        out.u[k] = fwd.point.at("u");
        out.v[k] = fwd.point.at("v");
        out.valid[k] = std::isfinite(out.u[k]) && std::isfinite(out.v[k]);
      } catch (const symmetry::FlowError&) {
        out.valid[k] = 0;
      }
    }
  }
  return out;
}

}  // namespace cheng::solutions
