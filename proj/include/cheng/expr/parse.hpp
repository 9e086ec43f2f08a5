#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cheng/expr/expression.hpp"

namespace cheng::expr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Reads the infix grammar written by to_string():
///
///   expr    := ['-'] term (('+' | '-') term)*
///   term    := factor (('*' | '/') factor)*
///   factor  := ['-'] primary ['^' factor]          exponent must be a rational constant
///   primary := number | name | call | '(' expr ')'
///   call    := name "'"* '(' args ')'              w'(f), w''(f): derivative of a 1-arg atom
///            | 'D[' name (',' int)+ ']' '(' args ')'  one derivative count per argument
///            | ('exp' | 'log' | 'sqrt') '(' expr ')'
///   number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]   read exactly
///   name    := letter (letter | digit | '_')*
Expr parse(std::string_view text);

/// A vector field `coeff d/dX + coeff d/dY ...`; a bare `d/dX` has
/// coefficient 1.  Returns (coordinate, coefficient) in input order.
std::vector<std::pair<std::string, Expr>> parse_vector_field(std::string_view text);

}  // namespace cheng::expr
