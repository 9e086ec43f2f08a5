#include "cheng/reduction/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cheng/expr/calculus.hpp"

namespace cheng::reduction {

bool QuadratureAtom::numeric(const expr::Environment& env) const {
  if (!expr::function_names(integrand).empty()) return false;
  for (const auto& s : expr::free_symbols(integrand)) {
    if (s != variable && !env.values().contains(s)) return false;
  }
  return true;
}

double QuadratureAtom::value(double at, const expr::Environment& env) const {
  const expr::CompiledExpr f(integrand, {variable}, env);
  auto g = [&f](double s) {
    const double arg[1] = {s};
    return f(arg);
  };
  if (at == 1.0) return 1.0;
  double error = 0.0;
  double integral = 0.0;
  try {
    integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 1.0, at, 15, 1e-13, &error);
  } catch (const expr::EvaluationError& e) {
    throw QuadratureDomainError(name + ": integrand " + expr::to_string(integrand) + " not defined on [1, " +
                                std::to_string(at) + "]: " + e.what());
  }
  if (!std::isfinite(integral) || error > kQuadratureTolerance) {
    throw QuadratureDomainError(name + ": quadrature did not reach tolerance on [1, " + std::to_string(at) + "]");
  }
  return 1.0 + integral;
}

expr::NumericFunction QuadratureAtom::function(const expr::Environment& env) const {
  // derivatives[k] is the (k+1)-th derivative of the atom.
  auto derivatives = std::make_shared<std::vector<expr::CompiledExpr>>();
  Expr d = integrand;
  for (int k = 0; k < 3; ++k) {
    derivatives->emplace_back(d, std::vector<std::string>{variable}, env);
    d = expr::differentiate(d, variable);
  }
  QuadratureAtom self = *this;
  return [self, env, derivatives](std::span<const double> args, std::span<const int> order) {
    const int k = order.empty() ? 0 : order[0];
    if (k == 0) return self.value(args[0], env);
    if (static_cast<std::size_t>(k) > derivatives->size()) {
      throw QuadratureDomainError(self.name + ": derivative order too high");
    }
    return (*derivatives)[static_cast<std::size_t>(k - 1)](args.first(1));
  };
}

Expr expand_quadrature_derivatives(const Expr& e, const std::vector<QuadratureAtom>& atoms) {
  if (atoms.empty()) return e;
  return expr::map_nodes(e, [&](const Expr& n) -> std::optional<Expr> {
    if (n.kind() != expr::Kind::Function) return std::nullopt;
    for (const auto& a : atoms) {
      if (a.name != n.name() || n.children().size() != 1 || n.derivative()[0] == 0) continue;
      const Expr arg = expand_quadrature_derivatives(n.children()[0], atoms);
      Expr d = expr::differentiate(a.integrand, a.variable, n.derivative()[0] - 1);
      expr::Substitution s;
      s.bind(a.variable, arg);
      return expr::substitute(d, s);
    }
    return std::nullopt;
  });
}

expr::Environment quadrature_environment(const std::vector<QuadratureAtom>& atoms, const expr::Environment& env) {
  expr::Environment out = env;
  for (const auto& a : atoms) {
    if (a.numeric(env)) out.set_function(a.name, a.function(env));
  }
  return out;
}

}  // namespace cheng::reduction
