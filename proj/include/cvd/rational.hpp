#pragma once

#include <complex>
#include <gmpxx.h>
#include <string>

namespace cvd {

using Rational = mpq_class;

Rational parse_rational(const std::string& text);  // "3", "-1/2", "0.25", "1e-3"
std::string to_string(const Rational& q);
double to_double(const Rational& q);

/// Exact complex number re + im*i with rational parts.
struct GaussRational {
  Rational re;
  Rational im;

  GaussRational() = default;
  GaussRational(long v) : re(v) {}  // NOLINT
  GaussRational(Rational r) : re(std::move(r)) { re.canonicalize(); }  // NOLINT
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }

  static GaussRational i_unit() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  GaussRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  GaussRational& operator+=(const GaussRational& o) { re += o.re; im += o.im; return *this; }
  GaussRational& operator-=(const GaussRational& o) { re -= o.re; im -= o.im; return *this; }
  GaussRational& operator*=(const GaussRational& o);
  GaussRational& operator/=(const GaussRational& o);

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// "1/2", "-3/4 i", "(1/2 + 3/4 i)"; parseable by the expression grammar.
std::string to_string(const GaussRational& z);

}  // namespace cvd
