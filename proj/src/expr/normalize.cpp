#include "cheng/expr/normalize.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

namespace cheng::expr {

namespace {

struct Monomial {
  // Sorted by kernel (ExprLess); exponents are never zero.
  std::vector<std::pair<Expr, int>> powers;
  // Argument of the merged exponential; zero when absent.
  Expr exp_arg;
};

// Lexicographic order, greatest kernel first, then the exponential argument.
int compare_monomials(const Monomial& a, const Monomial& b) {
  auto i = static_cast<std::ptrdiff_t>(a.powers.size()) - 1;
  auto j = static_cast<std::ptrdiff_t>(b.powers.size()) - 1;
  while (i >= 0 || j >= 0) {
    int c = 0;
    if (j < 0) {
      c = 1;
    } else if (i < 0) {
      c = -1;
    } else {
      c = compare(a.powers[static_cast<std::size_t>(i)].first, b.powers[static_cast<std::size_t>(j)].first);
    }
    if (c > 0) {
      return a.powers[static_cast<std::size_t>(i)].second > 0 ? 1 : -1;
    }
    if (c < 0) {
      return b.powers[static_cast<std::size_t>(j)].second > 0 ? -1 : 1;
    }
    const int ea = a.powers[static_cast<std::size_t>(i)].second;
    const int eb = b.powers[static_cast<std::size_t>(j)].second;
    if (ea != eb) return ea < eb ? -1 : 1;
    --i;
    --j;
  }
  return compare(a.exp_arg, b.exp_arg);
}

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b) < 0; }
};

using Poly = std::map<Monomial, Rational, MonomialLess>;

Expr combine_exp_args(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return normalize(a + b);
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.powers.reserve(a.powers.size() + b.powers.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.powers.size() || j < b.powers.size()) {
    int c = 0;
    if (i == a.powers.size()) {
      c = 1;
    } else if (j == b.powers.size()) {
      c = -1;
    } else {
      c = compare(a.powers[i].first, b.powers[j].first);
    }
    if (c < 0) {
      out.powers.push_back(a.powers[i++]);
    } else if (c > 0) {
      out.powers.push_back(b.powers[j++]);
    } else {
      const int e = a.powers[i].second + b.powers[j].second;
      if (e != 0) out.powers.emplace_back(a.powers[i].first, e);
      ++i;
      ++j;
    }
  }
  out.exp_arg = combine_exp_args(a.exp_arg, b.exp_arg);
  return out;
}

Monomial inverse(const Monomial& m) {
  Monomial out = m;
  for (auto& [k, e] : out.powers) e = -e;
  if (!out.exp_arg.is_zero()) out.exp_arg = normalize(-m.exp_arg);
  return out;
}

Monomial kernel_monomial(const Expr& kernel, int exponent = 1) {
  Monomial m;
  m.powers.emplace_back(kernel, exponent);
  return m;
}

void add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = p.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

Poly constant(const Rational& c) {
  Poly p;
  add_term(p, Monomial{}, c);
  return p;
}

Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) add_term(out, m, c);
  return out;
}

Poly scale(const Poly& a, const Monomial& m, const Rational& c) {
  Poly out;
  for (const auto& [n, d] : a) add_term(out, multiply(n, m), d * c);
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [m, c] : a) {
    for (const auto& [n, d] : b) add_term(out, multiply(m, n), c * d);
  }
  return out;
}

Poly power(const Poly& p, int n) {
  Poly result = constant(1);
  Poly base = p;
  while (n > 0) {
    if (n & 1) result = multiply(result, base);
    n >>= 1;
    if (n > 0) base = multiply(base, base);
  }
  return result;
}

int compare_polys(const Poly& a, const Poly& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (int c = compare_monomials(ia->first, ib->first); c != 0) return c;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia == a.end() && ib == b.end()) return 0;
  return ia == a.end() ? -1 : 1;
}

bool has_exp(const Poly& p) {
  return std::any_of(p.begin(), p.end(), [](const auto& t) { return !t.first.exp_arg.is_zero(); });
}

struct Factor {
  Poly poly;
  int multiplicity;
};

struct RationalFunction {
  Poly num;
  std::vector<Factor> den;  // sorted by compare_polys, primitive
};

struct Primitive {
  Rational coeff;
  Monomial content;
  Poly prim;  // leading coefficient 1, no monomial content; empty means 1
};

Primitive make_primitive(const Poly& p) {
  Primitive out;
  if (p.size() == 1) {
    out.coeff = p.begin()->second;
    out.content = p.begin()->first;
    return out;
  }
  std::map<Expr, int, ExprLess> min_exp;
  bool first = true;
  for (const auto& [m, c] : p) {
    std::map<Expr, int, ExprLess> here(m.powers.begin(), m.powers.end());
    if (first) {
      min_exp = here;
      first = false;
      continue;
    }
    for (auto it = min_exp.begin(); it != min_exp.end();) {
      auto h = here.find(it->first);
      const int e = h == here.end() ? 0 : h->second;
      it->second = std::min(it->second, e);
      it = it->second == 0 ? min_exp.erase(it) : std::next(it);
    }
    for (const auto& [k, e] : here) {
      if (e < 0 && !min_exp.contains(k)) min_exp[k] = e;
    }
  }
  // Negative exponents absent from some terms count as min(e, 0).
  for (auto& [k, e] : min_exp) {
    for (const auto& [m, c] : p) {
      auto it = std::find_if(m.powers.begin(), m.powers.end(),
                             [&](const auto& kp) { return compare(kp.first, k) == 0; });
      const int here = it == m.powers.end() ? 0 : it->second;
      e = std::min(e, here);
    }
  }
  for (const auto& [k, e] : min_exp) {
    if (e != 0) out.content.powers.emplace_back(k, e);
  }
  const Monomial inv = inverse(out.content);
  Poly shifted = scale(p, inv, 1);
  out.coeff = shifted.rbegin()->second;
  for (auto& [m, c] : shifted) c /= out.coeff;
  out.prim = std::move(shifted);
  return out;
}

Poly expand(const std::vector<Factor>& den) {
  Poly out = constant(1);
  for (const auto& f : den) out = multiply(out, power(f.poly, f.multiplicity));
  return out;
}

// Exact division num / p in the Laurent ring, or nullopt.  `p` must be
// primitive and free of exponentials.
std::optional<Poly> divide_exact(const Poly& num, const Poly& p) {
  if (p.size() <= 1 || has_exp(p)) return std::nullopt;
  std::map<Expr, int, ExprLess> shift_exp;
  for (const auto& [m, c] : num) {
    for (const auto& [k, e] : m.powers) {
      if (e < 0) {
        auto& s = shift_exp[k];
        s = std::min(s, e);
      }
    }
  }
  Monomial shift;
  for (const auto& [k, e] : shift_exp) shift.powers.emplace_back(k, -e);
  Poly rem = scale(num, shift, 1);
  const auto& [lead_m, lead_c] = *p.rbegin();
  Poly quotient;
  std::size_t guard = 0;
  while (!rem.empty()) {
    if (++guard > 100000) return std::nullopt;
    const auto [rm, rc] = *rem.rbegin();
    Monomial q;
    q.exp_arg = rm.exp_arg;
    std::map<Expr, int, ExprLess> exps(rm.powers.begin(), rm.powers.end());
    for (const auto& [k, e] : lead_m.powers) {
      auto it = exps.find(k);
      const int have = it == exps.end() ? 0 : it->second;
      if (have < e) return std::nullopt;
      exps[k] = have - e;
    }
    for (const auto& [k, e] : exps) {
      if (e != 0) q.powers.emplace_back(k, e);
    }
    const Rational qc = rc / lead_c;
    add_term(quotient, q, qc);
    rem = add(rem, scale(p, q, -qc));
  }
  return scale(quotient, inverse(shift), 1);
}

void cancel(RationalFunction& r) {
  if (r.num.empty()) {
    r.den.clear();
    return;
  }
  for (auto& f : r.den) {
    while (f.multiplicity > 0) {
      auto q = divide_exact(r.num, f.poly);
      if (!q) break;
      r.num = std::move(*q);
      --f.multiplicity;
    }
  }
  std::erase_if(r.den, [](const Factor& f) { return f.multiplicity == 0; });
}

RationalFunction from_poly(Poly p) { return RationalFunction{std::move(p), {}}; }

void insert_factor(std::vector<Factor>& den, const Poly& poly, int multiplicity,
                   bool take_max) {
  for (auto& f : den) {
    if (compare_polys(f.poly, poly) == 0) {
      f.multiplicity = take_max ? std::max(f.multiplicity, multiplicity) : f.multiplicity + multiplicity;
      return;
    }
  }
  den.push_back({poly, multiplicity});
  std::sort(den.begin(), den.end(),
            [](const Factor& a, const Factor& b) { return compare_polys(a.poly, b.poly) < 0; });
}

RationalFunction multiply(const RationalFunction& a, const RationalFunction& b) {
  RationalFunction out{multiply(a.num, b.num), a.den};
  for (const auto& f : b.den) insert_factor(out.den, f.poly, f.multiplicity, false);
  cancel(out);
  return out;
}

int multiplicity_of(const std::vector<Factor>& den, const Poly& poly) {
  for (const auto& f : den) {
    if (compare_polys(f.poly, poly) == 0) return f.multiplicity;
  }
  return 0;
}

RationalFunction add(const RationalFunction& a, const RationalFunction& b) {
  if (a.den.empty() && b.den.empty()) return from_poly(add(a.num, b.num));
  if (a.num.empty()) return b;
  if (b.num.empty()) return a;
  std::vector<Factor> lcm = a.den;
  for (const auto& f : b.den) insert_factor(lcm, f.poly, f.multiplicity, true);
  auto cofactor = [&](const std::vector<Factor>& den) {
    std::vector<Factor> missing;
    for (const auto& f : lcm) {
      const int k = f.multiplicity - multiplicity_of(den, f.poly);
      if (k > 0) missing.push_back({f.poly, k});
    }
    return expand(missing);
  };
  RationalFunction out{add(multiply(a.num, cofactor(a.den)), multiply(b.num, cofactor(b.den))),
                       std::move(lcm)};
  cancel(out);
  return out;
}

RationalFunction reciprocal(const RationalFunction& r) {
  if (r.num.empty()) throw std::domain_error("division by zero during normalization");
  Poly den_expanded = expand(r.den);
  if (r.num.size() == 1) {
    const auto& [m, c] = *r.num.begin();
    return from_poly(scale(den_expanded, inverse(m), Rational(1) / c));
  }
  Primitive pr = make_primitive(r.num);
  RationalFunction out{scale(den_expanded, inverse(pr.content), Rational(1) / pr.coeff), {}};
  out.den.push_back({std::move(pr.prim), 1});
  cancel(out);
  return out;
}

RationalFunction power(const RationalFunction& r, int n) {
  if (n < 0) return power(reciprocal(r), -n);
  RationalFunction out = from_poly(constant(1));
  for (int i = 0; i < n; ++i) out = multiply(out, r);
  return out;
}

RationalFunction kernel(const Expr& k) { return from_poly(Poly{{kernel_monomial(k), Rational(1)}}); }

RationalFunction to_rf(const Expr& e);

Expr normalize_function_atom(const Expr& e) {
  std::vector<Expr> args;
  args.reserve(e.children().size());
  for (const auto& a : e.children()) args.push_back(normalize(a));
  return function(e.name(), std::move(args), {e.derivative().begin(), e.derivative().end()});
}

RationalFunction to_rf(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return from_poly(constant(e.value()));
    case Kind::Symbol:
      return kernel(e);
    case Kind::Function:
      return kernel(normalize_function_atom(e));
    case Kind::Sum: {
      RationalFunction acc = from_poly({});
      for (const auto& t : e.children()) acc = add(acc, to_rf(t));
      return acc;
    }
    case Kind::Product: {
      RationalFunction acc = from_poly(constant(1));
      for (const auto& f : e.children()) acc = multiply(acc, to_rf(f));
      return acc;
    }
    case Kind::Power: {
      const Rational& q = e.value();
      if (denominator(q) == 1) {
        return power(to_rf(e.base()), numerator(q).convert_to<int>());
      }
      // b^(n/d) = (b^(1/d))^n with b^(1/d) as a kernel.
      Expr nb = normalize(e.base());
      const Rational root = Rational(1) / Rational(denominator(q));
      Expr k = pow(nb, root);
      RationalFunction rk = k.kind() == Kind::Power ? kernel(k) : to_rf(k);
      return power(rk, numerator(q).convert_to<int>());
    }
    case Kind::Exp: {
      Expr arg = normalize(e.argument());
      if (arg.is_zero()) return from_poly(constant(1));
      Monomial m;
      m.exp_arg = arg;
      return from_poly(Poly{{m, Rational(1)}});
    }
    case Kind::Log: {
      Expr l = log(normalize(e.argument()));
      return l.kind() == Kind::Log ? kernel(l) : to_rf(l);
    }
  }
  return from_poly({});
}

Expr monomial_to_expr(const Monomial& m, const Rational& c) {
  std::vector<Expr> factors;
  factors.reserve(m.powers.size() + 2);
  factors.emplace_back(c);
  for (const auto& [k, e] : m.powers) factors.push_back(pow(k, e));
  if (!m.exp_arg.is_zero()) factors.push_back(exp(m.exp_arg));
  return product(std::move(factors));
}

Expr poly_to_expr(const Poly& p) {
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p) terms.push_back(monomial_to_expr(m, c));
  return sum(std::move(terms));
}

Expr rf_to_expr(const RationalFunction& r) {
  std::vector<Expr> factors;
  factors.push_back(poly_to_expr(r.num));
  for (const auto& f : r.den) factors.push_back(pow(poly_to_expr(f.poly), -f.multiplicity));
  return product(std::move(factors));
}

// Multiplier that clears negative kernel powers from the numerator.
Monomial clearing_shift(const Poly& num) {
  std::map<Expr, int, ExprLess> shift_exp;
  for (const auto& [m, c] : num) {
    for (const auto& [k, e] : m.powers) {
      if (e < 0) {
        auto& s = shift_exp[k];
        s = std::min(s, e);
      }
    }
  }
  Monomial shift;
  for (const auto& [k, e] : shift_exp) shift.powers.emplace_back(k, -e);
  return shift;
}

}  // namespace

Expr normalize(const Expr& e) {
  if (e.is_number() || e.is_symbol()) return e;
  return rf_to_expr(to_rf(e));
}

Fraction as_fraction(const Expr& e) {
  RationalFunction r = to_rf(e);
  const Monomial shift = clearing_shift(r.num);
  Poly num = scale(r.num, shift, 1);
  Poly den = scale(expand(r.den), shift, 1);
  return {poly_to_expr(num), poly_to_expr(den)};
}

DegreeInfo degree_in(const Expr& e, const std::string& name) {
  RationalFunction r = to_rf(e);
  const Monomial shift = clearing_shift(r.num);
  Poly num = scale(r.num, shift, 1);
  Poly den = scale(expand(r.den), shift, 1);
  DegreeInfo info;
  const Expr target = symbol(name);
  auto scan = [&](const Poly& p, int& lo, int& hi) {
    bool first = true;
    for (const auto& [m, c] : p) {
      int d = 0;
      for (const auto& [k, exponent] : m.powers) {
        if (k == target) {
          d = exponent;
        } else if (contains_symbol(k, name)) {
          info.non_polynomial = true;
        }
      }
      if (!m.exp_arg.is_zero() && contains_symbol(m.exp_arg, name)) info.non_polynomial = true;
      lo = first ? d : std::min(lo, d);
      hi = first ? d : std::max(hi, d);
      first = false;
    }
  };
  int den_lo = 0;
  scan(num, info.numerator_min, info.numerator_max);
  scan(den, den_lo, info.denominator_max);
  return info;
}

}  // namespace cheng::expr
