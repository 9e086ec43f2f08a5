#include "cheng/expr/expression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace cheng::expr {

namespace detail {
struct Node {
  Kind kind;
  Rational value;
  std::string name;
  std::vector<Expr> children;
  std::vector<int> derivative;
  std::size_t hash = 0;
};
}  // namespace detail

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& r) {
  return std::hash<double>{}(r.convert_to<double>());
}

const Rational& rational_zero() {
  static const Rational zero{0};
  return zero;
}

}  // namespace

Expr make_node(Kind kind, Rational value, std::string name, std::vector<Expr> children,
               std::vector<int> derivative) {
  auto node = std::make_shared<detail::Node>();
  node->kind = kind;
  node->value = std::move(value);
  node->name = std::move(name);
  node->children = std::move(children);
  node->derivative = std::move(derivative);
  std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ULL;
  h = mix(h, hash_rational(node->value));
  h = mix(h, std::hash<std::string>{}(node->name));
  for (const auto& c : node->children) h = mix(h, c.hash());
  for (int d : node->derivative) h = mix(h, static_cast<std::size_t>(d));
  node->hash = h;
  return Expr(std::shared_ptr<const detail::Node>(std::move(node)));
}

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value)
    : node_(make_node(Kind::Number, value, {}, {}, {}).node_) {}
Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::span<const int> Expr::derivative() const { return node_->derivative; }
std::size_t Expr::hash() const { return node_->hash; }

bool Expr::is_zero() const { return kind() == Kind::Number && value() == 0; }
bool Expr::is_one() const { return kind() == Kind::Number && value() == 1; }
bool Expr::is_integer() const {
  return kind() == Kind::Number && denominator(value()) == 1;
}

bool operator==(const Expr& lhs, const Expr& rhs) {
  if (lhs.node_ == rhs.node_) return true;
  if (lhs.hash() != rhs.hash()) return false;
  return compare(lhs, rhs) == 0;
}

namespace {

int compare_children(std::span<const Expr> a, std::span<const Expr> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i], b[i]); c != 0) return c;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

int sign_of(int v) { return (v > 0) - (v < 0); }

}  // namespace

int compare(const Expr& lhs, const Expr& rhs) {
  if (lhs.kind() != rhs.kind()) {
    return lhs.kind() < rhs.kind() ? -1 : 1;
  }
  switch (lhs.kind()) {
    case Kind::Number:
      if (lhs.value() == rhs.value()) return 0;
      return lhs.value() < rhs.value() ? -1 : 1;
    case Kind::Symbol:
      return sign_of(lhs.name().compare(rhs.name()));
    case Kind::Sum:
    case Kind::Product:
    case Kind::Exp:
    case Kind::Log:
      return compare_children(lhs.children(), rhs.children());
    case Kind::Power: {
      if (int c = compare(lhs.base(), rhs.base()); c != 0) return c;
      if (lhs.value() == rhs.value()) return 0;
      return lhs.value() < rhs.value() ? -1 : 1;
    }
    case Kind::Function: {
      if (int c = sign_of(lhs.name().compare(rhs.name())); c != 0) return c;
      auto da = lhs.derivative();
      auto db = rhs.derivative();
      if (!std::equal(da.begin(), da.end(), db.begin(), db.end())) {
        return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end()) ? -1 : 1;
      }
      return compare_children(lhs.children(), rhs.children());
    }
  }
  return 0;
}

Expr number(const Rational& value) { return Expr(value); }

Expr symbol(std::string name) {
  return make_node(Kind::Symbol, rational_zero(), std::move(name), {}, {});
}

Expr function(std::string name, std::vector<Expr> args, std::vector<int> derivative) {
  if (derivative.empty()) derivative.assign(args.size(), 0);
  if (derivative.size() != args.size()) {
    throw std::invalid_argument("function atom '" + name +
                                "': derivative index does not match argument count");
  }
  for (int d : derivative) {
    if (d < 0) throw std::invalid_argument("negative derivative order for '" + name + "'");
  }
  return make_node(Kind::Function, rational_zero(), std::move(name), std::move(args),
                   std::move(derivative));
}

std::pair<Rational, Expr> split_coefficient(const Expr& e) {
  if (e.is_number()) return {e.value(), Expr(1)};
  if (e.kind() == Kind::Product && e.children().front().is_number()) {
    auto rest = e.children().subspan(1);
    if (rest.size() == 1) return {e.children().front().value(), rest.front()};
    return {e.children().front().value(),
            make_node(Kind::Product, rational_zero(), {}, {rest.begin(), rest.end()}, {})};
  }
  return {Rational(1), e};
}

Expr sum(std::vector<Expr> terms) {
  std::map<Expr, Rational, ExprLess> collected;
  Rational constant = 0;
  std::vector<Expr> stack(terms.rbegin(), terms.rend());
  while (!stack.empty()) {
    Expr t = std::move(stack.back());
    stack.pop_back();
    if (t.kind() == Kind::Sum) {
      for (auto it = t.children().rbegin(); it != t.children().rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (t.is_number()) {
      constant += t.value();
      continue;
    }
    auto [coeff, rest] = split_coefficient(t);
    collected[rest] += coeff;
  }
  std::vector<Expr> out;
  if (constant != 0) out.emplace_back(constant);
  for (auto& [rest, coeff] : collected) {
    if (coeff == 0) continue;
    if (coeff == 1) {
      out.push_back(rest);
    } else {
      out.push_back(product({Expr(coeff), rest}));
    }
  }
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out.front();
  std::sort(out.begin(), out.end(), ExprLess{});
  return make_node(Kind::Sum, rational_zero(), {}, std::move(out), {});
}

Expr product(std::vector<Expr> factors) {
  Rational coeff = 1;
  std::map<Expr, Rational, ExprLess> powers;
  std::vector<Expr> stack(factors.rbegin(), factors.rend());
  while (!stack.empty()) {
    Expr f = std::move(stack.back());
    stack.pop_back();
    switch (f.kind()) {
      case Kind::Product:
        for (auto it = f.children().rbegin(); it != f.children().rend(); ++it) {
          stack.push_back(*it);
        }
        break;
      case Kind::Number:
        coeff *= f.value();
        break;
      case Kind::Power:
        powers[f.base()] += f.value();
        break;
      default:
        powers[f] += 1;
    }
    if (coeff == 0) return Expr(0);
  }
  std::vector<Expr> out;
  bool again = false;
  for (auto& [base, exponent] : powers) {
    if (exponent == 0) continue;
    Expr p = pow(base, exponent);
    if (p.is_number()) {
      coeff *= p.value();
    } else {
      if (p.kind() == Kind::Product) again = true;
      out.push_back(std::move(p));
    }
  }
  if (coeff == 0) return Expr(0);
  if (again) {
    out.emplace_back(coeff);
    return product(std::move(out));
  }
  std::sort(out.begin(), out.end(), ExprLess{});
  if (coeff != 1 || out.empty()) out.insert(out.begin(), Expr(coeff));
  if (out.size() == 1) return out.front();
  return make_node(Kind::Product, rational_zero(), {}, std::move(out), {});
}

namespace {

Rational rational_power(const Rational& base, long long exponent) {
  Rational result = 1;
  Rational b = exponent < 0 ? Rational(1) / base : base;
  unsigned long long n = exponent < 0 ? static_cast<unsigned long long>(-exponent)
                                      : static_cast<unsigned long long>(exponent);
  while (n > 0) {
    if (n & 1U) result *= b;
    b *= b;
    n >>= 1U;
  }
  return result;
}

bool is_integral(const Rational& r) { return denominator(r) == 1; }

}  // namespace

Expr pow(const Expr& base, const Rational& exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_number()) {
    if (base.value() == 1) return Expr(1);
    if (is_integral(exponent) && !(base.value() == 0 && exponent < 0)) {
      return Expr(rational_power(base.value(), numerator(exponent).convert_to<long long>()));
    }
    return make_node(Kind::Power, exponent, {}, {base}, {});
  }
  if (base.kind() == Kind::Power && is_integral(exponent)) {
    return pow(base.base(), base.value() * exponent);
  }
  if (base.kind() == Kind::Product && is_integral(exponent)) {
    std::vector<Expr> parts;
    parts.reserve(base.children().size());
    for (const auto& f : base.children()) parts.push_back(pow(f, exponent));
    return product(std::move(parts));
  }
  if (base.kind() == Kind::Exp) {
    return exp(product({Expr(exponent), base.argument()}));
  }
  return make_node(Kind::Power, exponent, {}, {base}, {});
}

Expr exp(const Expr& argument) {
  if (argument.is_zero()) return Expr(1);
  if (argument.kind() == Kind::Log) return argument.argument();
  return make_node(Kind::Exp, rational_zero(), {}, {argument}, {});
}

Expr log(const Expr& argument) {
  if (argument.is_one()) return Expr(0);
  if (argument.kind() == Kind::Exp) return argument.argument();
  return make_node(Kind::Log, rational_zero(), {}, {argument}, {});
}

Expr operator-(const Expr& e) { return product({Expr(-1), e}); }
Expr operator+(const Expr& lhs, const Expr& rhs) { return sum({lhs, rhs}); }
Expr operator-(const Expr& lhs, const Expr& rhs) { return sum({lhs, -rhs}); }
Expr operator*(const Expr& lhs, const Expr& rhs) { return product({lhs, rhs}); }
Expr operator/(const Expr& lhs, const Expr& rhs) { return product({lhs, pow(rhs, -1)}); }

namespace {

void walk(const Expr& e, const std::function<void(const Expr&)>& visit) {
  visit(e);
  for (const auto& c : e.children()) walk(c, visit);
}

}  // namespace

std::vector<std::string> free_symbols(const Expr& e) {
  std::set<std::string> names;
  walk(e, [&](const Expr& n) {
    if (n.is_symbol()) names.insert(n.name());
  });
  return {names.begin(), names.end()};
}

std::vector<std::string> function_names(const Expr& e) {
  std::set<std::string> names;
  walk(e, [&](const Expr& n) {
    if (n.kind() == Kind::Function) names.insert(n.name());
  });
  return {names.begin(), names.end()};
}

bool contains_symbol(const Expr& e, const std::string& name) {
  if (e.is_symbol()) return e.name() == name;
  for (const auto& c : e.children()) {
    if (contains_symbol(c, name)) return true;
  }
  return false;
}

bool contains_function(const Expr& e, const std::string& name) {
  if (e.kind() == Kind::Function && e.name() == name) return true;
  for (const auto& c : e.children()) {
    if (contains_function(c, name)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecPower = 3;

std::string print(const Expr& e, int parent);

std::string print_rational(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

std::string print_exponent(const Rational& q) {
  if (is_integral(q) && q > 0) return print_rational(q);
  return "(" + print_rational(q) + ")";
}

// Prints coeff * factors, moving negative powers below a fraction bar.
std::string print_product(const Rational& coeff, std::span<const Expr> factors, int parent) {
  std::vector<std::string> num;
  std::vector<std::string> den;
  const auto p = numerator(coeff);
  const auto q = denominator(coeff);
  bool negative = p < 0;
  for (const auto& f : factors) {
    if (f.kind() == Kind::Power && f.value() < 0) {
      Expr inv = pow(f.base(), -f.value());
      den.push_back(print(inv, kPrecPower));
    } else {
      num.push_back(print(f, kPrecProduct));
    }
  }
  std::ostringstream os;
  if (negative) os << "-";
  const auto abs_p = negative ? decltype(p)(-p) : p;
  if (abs_p != 1 || num.empty()) {
    os << abs_p;
    if (!num.empty()) os << "*";
  }
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (i) os << "*";
    os << num[i];
  }
  if (q != 1) den.insert(den.begin(), [&] {
      std::ostringstream d;
      d << q;
      return d.str();
    }());
  if (!den.empty()) {
    os << "/";
    if (den.size() == 1) {
      os << den.front();
    } else {
      os << "(";
      for (std::size_t i = 0; i < den.size(); ++i) {
        if (i) os << "*";
        os << den[i];
      }
      os << ")";
    }
  }
  std::string s = os.str();
  const bool needs_parens = (negative && parent > kPrecSum) || parent > kPrecProduct;
  return needs_parens ? "(" + s + ")" : s;
}

std::string print(const Expr& e, int parent) {
  switch (e.kind()) {
    case Kind::Number: {
      const bool compound = e.value() < 0 || !is_integral(e.value());
      std::string s = print_rational(e.value());
      if (compound && parent > kPrecSum) return "(" + s + ")";
      return s;
    }
    case Kind::Symbol:
      return e.name();
    case Kind::Sum: {
      std::ostringstream os;
      bool first = true;
      for (const auto& t : e.children()) {
        auto [c, rest] = split_coefficient(t);
        if (first) {
          os << print(t, kPrecSum);
          first = false;
        } else if (c < 0) {
          os << " - " << print(product({Expr(Rational(-c)), rest}), kPrecProduct);
        } else {
          os << " + " << print(t, kPrecSum);
        }
      }
      return parent > kPrecSum ? "(" + os.str() + ")" : os.str();
    }
    case Kind::Product: {
      auto [c, rest] = split_coefficient(e);
      if (rest.kind() == Kind::Product) return print_product(c, rest.children(), parent);
      std::vector<Expr> one{rest};
      return print_product(c, one, parent);
    }
    case Kind::Power: {
      if (e.value() < 0) {
        std::vector<Expr> one{e};
        return print_product(1, one, parent);
      }
      std::string s = print(e.base(), kPrecPower + 1) + "^" + print_exponent(e.value());
      return parent > kPrecPower ? "(" + s + ")" : s;
    }
    case Kind::Exp:
      return "exp(" + print(e.argument(), 0) + ")";
    case Kind::Log:
      return "log(" + print(e.argument(), 0) + ")";
    case Kind::Function: {
      std::ostringstream os;
      auto d = e.derivative();
      int total = 0;
      for (int k : d) total += k;
      if (total == 0) {
        os << e.name();
      } else if (d.size() == 1 && total <= 3) {
        os << e.name() << std::string(static_cast<std::size_t>(total), '\'');
      } else {
        os << "D[" << e.name();
        for (int k : d) os << "," << k;
        os << "]";
      }
      os << "(";
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) os << ",";
        os << print(e.children()[i], 0);
      }
      os << ")";
      return os.str();
    }
  }
  return {};
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

Rational to_rational(double value) {
  if (!std::isfinite(value)) throw std::domain_error("cannot convert non-finite value to rational");
  if (value == 0.0) return 0;
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // 53 significant bits fit a 64-bit integer exactly.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r{scaled};
  if (exponent > 0) {
    r *= rational_power(2, exponent);
  } else if (exponent < 0) {
    r /= rational_power(2, -exponent);
  }
  return r;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace cheng::expr
