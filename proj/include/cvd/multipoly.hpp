#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cvd/rational.hpp"

namespace cvd {

/// Sparse polynomial with exact rational coefficients in up to 16 variables,
/// each of degree at most 15. Exponents are packed four bits per variable.
class MultiPoly {
 public:
  static constexpr int kMaxVars = 16;
  static constexpr int kMaxDegree = 15;

  struct Term {
    std::uint64_t key;
    Rational coeff;
  };

  MultiPoly() = default;
  MultiPoly(long c) : MultiPoly(Rational(c)) {}  // NOLINT
  MultiPoly(const Rational& c);  // NOLINT
  static MultiPoly variable(int index);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  int total_degree() const;
  int degree_in(int var) const;
  int max_variable() const;  // -1 for constants

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const Rational& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b);

  MultiPoly derivative(int var) const;
  MultiPoly substitute(int var, const Rational& value) const;
  double evaluate(const std::vector<double>& x) const;
  std::complex<double> evaluate(const std::vector<std::complex<double>>& x) const;
  Rational evaluate_exact(const std::vector<Rational>& x) const;

  std::string to_string(const std::vector<std::string>& names = {}) const;

  static int exponent(std::uint64_t key, int var) {
    return static_cast<int>((key >> (4 * var)) & 0xF);
  }

 private:
  void normalize();
  std::vector<Term> terms_;  // sorted by key, no zero coefficients
};

/// Double-precision evaluator for a polynomial and its gradient, used by the
/// Newton and homotopy loops.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  CompiledPoly(const MultiPoly& p, int n_vars);

  template <class T>
  T value(const std::vector<T>& x) const;
  template <class T>
  void value_and_gradient(const std::vector<T>& x, T& value, std::vector<T>& grad) const;

 private:
  int n_vars_ = 0;
  int max_exp_ = 0;
  std::vector<double> coeffs_;
  std::vector<std::uint32_t> offsets_;  // term i owns [offsets_[i], offsets_[i+1])
  std::vector<std::uint8_t> vars_;
  std::vector<std::uint8_t> exps_;
};

extern template double CompiledPoly::value(const std::vector<double>&) const;
extern template std::complex<double> CompiledPoly::value(const std::vector<std::complex<double>>&) const;
extern template void CompiledPoly::value_and_gradient(const std::vector<double>&, double&,
                                                      std::vector<double>&) const;
extern template void CompiledPoly::value_and_gradient(const std::vector<std::complex<double>>&,
                                                      std::complex<double>&,
                                                      std::vector<std::complex<double>>&) const;

}  // namespace cvd
