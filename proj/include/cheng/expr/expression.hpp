#pragma once

// Immutable symbolic expression trees.
//
// Nodes are shared and never mutated after construction.  The smart
// constructors (sum, product, pow, exp, log, function) keep trees in a light
// canonical form: nested sums/products are flattened, numeric constants are
// folded, identical terms/factors are merged and children are sorted by
// compare().  Full rational normalization lives in normalize.hpp.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cheng::expr {

using Rational = boost::multiprecision::cpp_rational;

enum class Kind : std::uint8_t {
  Number,
  Symbol,
  Sum,
  Product,
  Power,
  Exp,
  Log,
  Function,
};

class Expr;

namespace detail {
struct Node;
}

class Expr {
 public:
  /// The integer 0.
  Expr();
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  Kind kind() const;

  /// Number value, or the exponent of a Power node.
  const Rational& value() const;
  /// Symbol name or function-atom name.
  const std::string& name() const;
  /// Terms, factors, the base of a power, the argument of exp/log, or the
  /// arguments of a function atom.
  std::span<const Expr> children() const;
  /// Function atoms only: derivative count per argument slot.
  std::span<const int> derivative() const;
  std::size_t hash() const;

  bool is_number() const { return kind() == Kind::Number; }
  bool is_symbol() const { return kind() == Kind::Symbol; }
  bool is_zero() const;
  bool is_one() const;
  bool is_integer() const;

  const Expr& base() const { return children()[0]; }
  const Expr& argument() const { return children()[0]; }

  friend bool operator==(const Expr& lhs, const Expr& rhs);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node);
  std::shared_ptr<const detail::Node> node_;

  friend Expr make_node(Kind, Rational, std::string, std::vector<Expr>, std::vector<int>);
};

/// Total order on trees: kind first, then contents.  Structurally equal
/// trees compare equal.
int compare(const Expr& lhs, const Expr& rhs);

struct ExprLess {
  bool operator()(const Expr& lhs, const Expr& rhs) const { return compare(lhs, rhs) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr number(const Rational& value);
Expr symbol(std::string name);
/// Abstract function atom `name(args...)`, differentiated `derivative[i]`
/// times with respect to argument slot i.  An empty derivative vector means
/// "not differentiated".
Expr function(std::string name, std::vector<Expr> args, std::vector<int> derivative = {});

Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow(const Expr& base, const Rational& exponent);
Expr exp(const Expr& argument);
Expr log(const Expr& argument);

Expr operator-(const Expr& e);
Expr operator+(const Expr& lhs, const Expr& rhs);
Expr operator-(const Expr& lhs, const Expr& rhs);
Expr operator*(const Expr& lhs, const Expr& rhs);
Expr operator/(const Expr& lhs, const Expr& rhs);

/// Splits `e` into (numeric coefficient, remaining factor).
std::pair<Rational, Expr> split_coefficient(const Expr& e);

/// Names of all symbols in `e` (sorted, unique).
std::vector<std::string> free_symbols(const Expr& e);
/// Distinct function-atom names in `e` (sorted, unique).
std::vector<std::string> function_names(const Expr& e);
/// True if the symbol occurs anywhere in `e`, including inside atom arguments.
bool contains_symbol(const Expr& e, const std::string& name);
bool contains_function(const Expr& e, const std::string& name);

/// Infix rendering that parse() reads back.
std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

/// Exact conversion of a finite double to a rational.
Rational to_rational(double value);
double to_double(const Rational& value);

}  // namespace cheng::expr
