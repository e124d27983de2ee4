#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cvd/rational.hpp"

namespace cvd {

/// Exponents laid out as [x0, p0, x1, p1, ...]; the word is X0^x0 P0^p0 X1^x1 ...
struct Monomial {
  std::vector<std::uint16_t> exps;

  int n_modes() const { return static_cast<int>(exps.size() / 2); }
  int x(int mode) const { return exps[2 * mode]; }
  int p(int mode) const { return exps[2 * mode + 1]; }
  int degree() const;
  int degree(int mode) const { return x(mode) + p(mode); }
  int active_modes() const;
  bool is_identity() const { return degree() == 0; }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded order: higher total degree first, then lexicographic on exponents.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// A single letter of an operator word: X or P on one mode.
struct Letter {
  int mode;
  bool is_p;
};

class QuadPolynomial {
 public:
  using TermMap = std::map<Monomial, GaussRational, MonomialOrder>;

  explicit QuadPolynomial(int n_modes = 1);

  static QuadPolynomial scalar(const GaussRational& c, int n_modes = 1);
  static QuadPolynomial x(int mode, int n_modes, int power = 1);
  static QuadPolynomial p(int mode, int n_modes, int power = 1);
  static QuadPolynomial term(const Monomial& m, const GaussRational& c);
  static QuadPolynomial canonicalize(const std::vector<Letter>& word, int n_modes);

  int n_modes() const { return n_modes_; }
  const TermMap& terms() const { return terms_; }
  Monomial identity_monomial() const;

  void add_term(const Monomial& m, const GaussRational& c);
  GaussRational coefficient(const Monomial& m) const;
  GaussRational scalar_part() const;
  QuadPolynomial without_scalar() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_scalar() const;
  int degree() const;
  QuadPolynomial with_modes(int n_modes) const;

  QuadPolynomial adjoint() const;
  bool is_hermitian() const { return adjoint() == *this; }

  QuadPolynomial& operator+=(const QuadPolynomial& o);
  QuadPolynomial& operator-=(const QuadPolynomial& o);
  QuadPolynomial& operator*=(const GaussRational& c);

  friend QuadPolynomial operator+(QuadPolynomial a, const QuadPolynomial& b) { return a += b; }
  friend QuadPolynomial operator-(QuadPolynomial a, const QuadPolynomial& b) { return a -= b; }
  friend QuadPolynomial operator-(QuadPolynomial a) { return a *= GaussRational(-1); }
  friend QuadPolynomial operator*(QuadPolynomial a, const GaussRational& c) { return a *= c; }
  friend QuadPolynomial operator*(const GaussRational& c, QuadPolynomial a) { return a *= c; }
  friend QuadPolynomial operator*(const QuadPolynomial& a, const QuadPolynomial& b);
  friend bool operator==(const QuadPolynomial& a, const QuadPolynomial& b);

  /// `coeff * X0^m P0^n X1^r ...` terms joined by +/-; parse() reads it back.
  std::string to_string() const;

 private:
  int n_modes_;
  TermMap terms_;
};

QuadPolynomial multiply(const QuadPolynomial& a, const QuadPolynomial& b);
QuadPolynomial commutator(const QuadPolynomial& a, const QuadPolynomial& b);
QuadPolynomial power(const QuadPolynomial& a, int k);

/// X -> P, P -> -X on `mode`; `quarter_turns` applications (negative allowed).
QuadPolynomial fourier_conjugate(const QuadPolynomial& a, int mode, int quarter_turns = 1);

std::string monomial_to_string(const Monomial& m);

inline std::ostream& operator<<(std::ostream& os, const QuadPolynomial& q) { return os << q.to_string(); }

}  // namespace cvd
