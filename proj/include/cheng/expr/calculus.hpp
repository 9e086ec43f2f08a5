#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cheng/expr/expression.hpp"

namespace cheng::expr {

/// Exact partial derivative with respect to the symbol `var`.  Function atoms
/// are differentiated by the chain rule through their arguments, bumping the
/// derivative index of the matching slot.
Expr differentiate(const Expr& e, const std::string& var);
Expr differentiate(const Expr& e, const std::string& var, int order);

/// Replacement for a function atom: `name(params...) := body`.
struct FunctionReplacement {
  std::vector<std::string> parameters;
  Expr body;
};

/// Symbolic binding.  Each symbol or function name may be bound once.
class Substitution {
 public:
  Substitution& bind(const std::string& name, Expr value);
  Substitution& bind_function(const std::string& name, std::vector<std::string> parameters,
                              Expr body);

  bool empty() const { return symbols_.empty() && functions_.empty(); }
  const std::map<std::string, Expr>& symbols() const { return symbols_; }
  const std::map<std::string, FunctionReplacement>& functions() const { return functions_; }

 private:
  std::map<std::string, Expr> symbols_;
  std::map<std::string, FunctionReplacement> functions_;
};

/// Simultaneous substitution.  A bound function atom `F^(alpha)(args)` is
/// replaced by the alpha-th derivative of its body evaluated at the
/// (substituted) arguments; replacement bodies are not substituted again.
Expr substitute(const Expr& e, const Substitution& binding);

/// Pre-order rewrite: `fn` is offered every node; a returned expression
/// replaces the node (and is not visited further), nullopt descends.
Expr map_nodes(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn);

}  // namespace cheng::expr
