#pragma once

#include <stdexcept>
#include <string>

#include "cvd/quad_polynomial.hpp"

namespace cvd {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Reads a Hamiltonian expression. Grammar: X<k>, P<k> (bare X/P mean mode 0),
/// integer powers via ^, + - * and juxtaposition, parentheses, numeric literals
/// (integers, a/b, decimals) with an optional `i` suffix, and `i` alone.
/// Products are operator words taken left to right. The mode count is the
/// larger of `min_modes` and the highest mode index plus one.
QuadPolynomial parse_polynomial(const std::string& text, int min_modes = 1);

}  // namespace cvd
