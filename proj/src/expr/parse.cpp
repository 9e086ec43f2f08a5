#include "cheng/expr/parse.hpp"

#include <cctype>

namespace cheng::expr {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr expression() {
    skip();
    std::vector<Expr> terms;
    bool negate = false;
    if (peek() == '-') {
      ++pos_;
      negate = true;
    }
    Expr first = term();
    terms.push_back(negate ? -first : first);
    for (;;) {
      skip();
      const char c = peek();
      if (c != '+' && c != '-') break;
      if (at_field_token()) break;
      ++pos_;
      Expr t = term();
      terms.push_back(c == '-' ? -t : t);
    }
    return sum(std::move(terms));
  }

  // Coefficient term in a vector field; stops before `d/dX`.
  Expr term() {
    Expr acc = factor();
    for (;;) {
      skip();
      const char c = peek();
      if (c != '*' && c != '/') break;
      const std::size_t save = pos_;
      ++pos_;
      skip();
      if (at_field_token()) {
        pos_ = save;
        break;
      }
      Expr rhs = factor();
      acc = c == '*' ? acc * rhs : acc / rhs;
    }
    return acc;
  }

  bool at_field_token() {
    skip();
    return s_.substr(pos_, 3) == "d/d";
  }

  std::string field_token() {
    pos_ += 3;
    return name();
  }

  bool done() {
    skip();
    return pos_ >= s_.size();
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  std::size_t position() const { return pos_; }
  void advance() { ++pos_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

 private:
  Expr factor() {
    skip();
    if (peek() == '-') {
      ++pos_;
      return -factor();
    }
    Expr base = primary();
    skip();
    if (peek() == '^') {
      ++pos_;
      Expr exponent = factor();
      if (!exponent.is_number()) fail("exponent must be a rational constant");
      return pow(base, exponent.value());
    }
    return base;
  }

  Expr primary() {
    skip();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (c == 'D' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '[') return derivative_atom();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id = name();
      int primes = 0;
      while (peek() == '\'') {
        ++primes;
        ++pos_;
      }
      skip();
      if (peek() != '(') {
        if (primes) fail("derivative mark without argument list");
        return symbol(id);
      }
      std::vector<Expr> args = arguments();
      if (primes == 0 && (id == "exp" || id == "log" || id == "sqrt")) {
        if (args.size() != 1) fail(id + " takes one argument");
        if (id == "exp") return exp(args[0]);
        if (id == "log") return log(args[0]);
        return pow(args[0], Rational(1, 2));
      }
      if (primes && args.size() != 1) fail("prime notation needs a one-argument atom");
      std::vector<int> d;
      if (primes) d.push_back(primes);
      return function(id, std::move(args), std::move(d));
    }
    fail("unexpected character");
  }

  Expr derivative_atom() {
    pos_ += 2;
    skip();
    std::string id = name();
    std::vector<int> d;
    skip();
    while (peek() == ',') {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (start == pos_) fail("expected derivative count");
      d.push_back(std::stoi(std::string(s_.substr(start, pos_ - start))));
      skip();
    }
    expect(']');
    std::vector<Expr> args = arguments();
    if (d.size() != args.size()) fail("derivative index length must match argument count");
    return function(id, std::move(args), std::move(d));
  }

  std::vector<Expr> arguments() {
    expect('(');
    std::vector<Expr> args;
    skip();
    if (peek() == ')') {
      ++pos_;
      return args;
    }
    for (;;) {
      args.push_back(expression());
      skip();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return args;
    }
  }

  std::string name() {
    skip();
    const std::size_t start = pos_;
    if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected a name");
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Expr number_literal() {
    Rational value = 0;
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      value = value * 10 + (peek() - '0');
      ++pos_;
      digits = true;
    }
    if (peek() == '.') {
      ++pos_;
      Rational scale = 1;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        scale /= 10;
        value += scale * (peek() - '0');
        ++pos_;
        digits = true;
      }
    }
    if (!digits) fail("malformed number");
    if ((peek() == 'e' || peek() == 'E') && pos_ + 1 < s_.size()) {
      std::size_t look = pos_ + 1;
      int sign = 1;
      if (s_[look] == '+' || s_[look] == '-') {
        sign = s_[look] == '-' ? -1 : 1;
        ++look;
      }
      if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
        pos_ = look;
        int e = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          e = e * 10 + (peek() - '0');
          ++pos_;
        }
        for (int i = 0; i < e; ++i) {
          if (sign > 0) {
            value *= 10;
          } else {
            value /= 10;
          }
        }
      }
    }
    return number(value);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p(text);
  Expr e = p.expression();
  if (!p.done()) p.fail("trailing input");
  return e;
}

std::vector<std::pair<std::string, Expr>> parse_vector_field(std::string_view text) {
  Parser p(text);
  std::vector<std::pair<std::string, Expr>> out;
  while (!p.done()) {
    Expr sign = 1;
    p.skip();
    if (!out.empty()) {
      if (p.peek() == '+') {
        p.advance();
      } else if (p.peek() == '-') {
        p.advance();
        sign = -1;
      } else {
        p.fail("expected '+' or '-' between field terms");
      }
    } else if (p.peek() == '-') {
      p.advance();
      sign = -1;
    }
    Expr coeff = 1;
    if (!p.at_field_token()) {
      coeff = p.term();
      p.skip();
      if (p.peek() == '*') p.advance();
    }
    if (!p.at_field_token()) p.fail("expected d/dX");
    std::string coord = p.field_token();
    for (const auto& [c, e] : out) {
      if (c == coord) p.fail("coordinate " + coord + " appears twice");
    }
    out.emplace_back(coord, sign * coeff);
  }
  if (out.empty()) throw ParseError("empty vector field", 0);
  return out;
}

}  // namespace cheng::expr
