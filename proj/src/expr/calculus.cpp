#include "cheng/expr/calculus.hpp"

#include <stdexcept>

namespace cheng::expr {

Expr differentiate(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case Kind::Number:
      return Expr(0);
    case Kind::Symbol:
      return Expr(e.name() == var ? 1 : 0);
    case Kind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(e.children().size());
      for (const auto& t : e.children()) terms.push_back(differentiate(t, var));
      return sum(std::move(terms));
    }
    case Kind::Product: {
      const auto factors = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Expr d = differentiate(factors[i], var);
        if (d.is_zero()) continue;
        std::vector<Expr> parts;
        parts.reserve(factors.size());
        for (std::size_t j = 0; j < factors.size(); ++j) parts.push_back(j == i ? d : factors[j]);
        terms.push_back(product(std::move(parts)));
      }
      return sum(std::move(terms));
    }
    case Kind::Power: {
      Expr d = differentiate(e.base(), var);
      if (d.is_zero()) return Expr(0);
      return product({Expr(e.value()), pow(e.base(), e.value() - 1), d});
    }
    case Kind::Exp: {
      Expr d = differentiate(e.argument(), var);
      if (d.is_zero()) return Expr(0);
      return product({e, d});
    }
    case Kind::Log: {
      Expr d = differentiate(e.argument(), var);
      if (d.is_zero()) return Expr(0);
      return product({d, pow(e.argument(), -1)});
    }
    case Kind::Function: {
      const auto args = e.children();
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < args.size(); ++k) {
        Expr d = differentiate(args[k], var);
        if (d.is_zero()) continue;
        std::vector<int> index(e.derivative().begin(), e.derivative().end());
        ++index[k];
        terms.push_back(product({d, function(e.name(), {args.begin(), args.end()}, index)}));
      }
      return sum(std::move(terms));
    }
  }
  return Expr(0);
}

Expr differentiate(const Expr& e, const std::string& var, int order) {
  if (order < 0) throw std::invalid_argument("negative differentiation order");
  Expr out = e;
  for (int i = 0; i < order; ++i) out = differentiate(out, var);
  return out;
}

Substitution& Substitution::bind(const std::string& name, Expr value) {
  if (symbols_.contains(name) || functions_.contains(name)) {
    throw std::invalid_argument("duplicate binding for '" + name + "'");
  }
  symbols_.emplace(name, std::move(value));
  return *this;
}

Substitution& Substitution::bind_function(const std::string& name,
                                          std::vector<std::string> parameters, Expr body) {
  if (symbols_.contains(name) || functions_.contains(name)) {
    throw std::invalid_argument("duplicate binding for '" + name + "'");
  }
  functions_.emplace(name, FunctionReplacement{std::move(parameters), std::move(body)});
  return *this;
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> children) {
  switch (e.kind()) {
    case Kind::Sum:
      return sum(std::move(children));
    case Kind::Product:
      return product(std::move(children));
    case Kind::Power:
      return pow(children.front(), e.value());
    case Kind::Exp:
      return exp(children.front());
    case Kind::Log:
      return log(children.front());
    case Kind::Function:
      return function(e.name(), std::move(children), {e.derivative().begin(), e.derivative().end()});
    default:
      return e;
  }
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& binding) {
  if (binding.empty()) return e;
  switch (e.kind()) {
    case Kind::Number:
      return e;
    case Kind::Symbol: {
      auto it = binding.symbols().find(e.name());
      return it == binding.symbols().end() ? e : it->second;
    }
    default:
      break;
  }
  std::vector<Expr> children;
  children.reserve(e.children().size());
  for (const auto& c : e.children()) children.push_back(substitute(c, binding));

  if (e.kind() == Kind::Function) {
    auto it = binding.functions().find(e.name());
    if (it != binding.functions().end()) {
      const auto& repl = it->second;
      if (repl.parameters.size() != children.size()) {
        throw std::invalid_argument("replacement for '" + e.name() + "' has " +
                                    std::to_string(repl.parameters.size()) +
                                    " parameters, atom has " + std::to_string(children.size()) +
                                    " arguments");
      }
      Expr body = repl.body;
      for (std::size_t k = 0; k < children.size(); ++k) {
        body = differentiate(body, repl.parameters[k], e.derivative()[k]);
      }
      Substitution at_args;
      for (std::size_t k = 0; k < children.size(); ++k) {
        at_args.bind(repl.parameters[k], children[k]);
      }
      return substitute(body, at_args);
    }
  }
  return rebuild(e, std::move(children));
}

Expr map_nodes(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn) {
  if (auto r = fn(e)) return *r;
  if (e.children().empty()) return e;
  std::vector<Expr> children;
  children.reserve(e.children().size());
  for (const auto& c : e.children()) children.push_back(map_nodes(c, fn));
  return rebuild(e, std::move(children));
}

}  // namespace cheng::expr
