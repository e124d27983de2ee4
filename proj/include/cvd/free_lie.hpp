#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvd/multipoly.hpp"
#include "cvd/quad_polynomial.hpp"
#include "cvd/rational.hpp"

namespace cvd {

/// A word over generator indices; each char holds one index.
using Word = std::string;

/// Ordered generator symbols with integer weights (grading). Word weight is the
/// sum of its letters' weights and truncation is by weight.
struct Alphabet {
  std::vector<std::string> names;
  std::vector<int> weights;

  static Alphabet plain(const std::vector<std::string>& names);
  int size() const { return static_cast<int>(names.size()); }
  int weight(const Word& w) const;
  std::string spell(const Word& w) const;
  bool operator==(const Alphabet&) const = default;
};

class NotLieElement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from(const Rational& q) { return q.get_d(); }
  static bool is_zero(double v) { return v == 0.0; }
  static double magnitude(double v) { return std::abs(v); }
};

template <>
struct ScalarTraits<std::complex<double>> {
  static constexpr bool exact = false;
  static std::complex<double> from(const Rational& q) { return q.get_d(); }
  static bool is_zero(const std::complex<double>& v) { return v == 0.0; }
  static double magnitude(const std::complex<double>& v) { return std::abs(v); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from(const Rational& q) { return q; }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
  static double magnitude(const Rational& v) { return std::abs(v.get_d()); }
};

template <>
struct ScalarTraits<MultiPoly> {
  static constexpr bool exact = true;
  static MultiPoly from(const Rational& q) { return MultiPoly(q); }
  static bool is_zero(const MultiPoly& v) { return v.is_zero(); }
  static double magnitude(const MultiPoly& v) {
    if (!v.is_constant()) throw std::logic_error("magnitude of a non-constant polynomial");
    return std::abs(v.constant_term().get_d());
  }
};

/// Element of the free associative algebra truncated at word weight `order`.
template <class S>
class TruncatedSeries {
 public:
  using Traits = ScalarTraits<S>;
  using CoeffMap = std::map<Word, S>;

  TruncatedSeries(Alphabet alphabet, int order) : alphabet_(std::move(alphabet)), order_(order) {
    if (order < 0) throw std::invalid_argument("negative truncation order");
  }

  static TruncatedSeries constant(const Alphabet& a, int order, const S& c) {
    TruncatedSeries s(a, order);
    s.add(Word(), c);
    return s;
  }
  static TruncatedSeries generator(const Alphabet& a, int order, int g, const S& c) {
    TruncatedSeries s(a, order);
    s.add(Word(1, static_cast<char>(g)), c);
    return s;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  int order() const { return order_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  S coefficient(const Word& w) const {
    auto it = coeffs_.find(w);
    return it == coeffs_.end() ? Traits::from(Rational(0)) : it->second;
  }

  void add(const Word& w, const S& c) {
    if (Traits::is_zero(c) || alphabet_.weight(w) > order_) return;
    auto [it, fresh] = coeffs_.try_emplace(w, c);
    if (!fresh) {
      it->second = it->second + c;
      if (Traits::is_zero(it->second)) coeffs_.erase(it);
    }
  }

  /// Keeps only words of exactly this weight.
  TruncatedSeries homogeneous_part(int weight) const {
    TruncatedSeries out(alphabet_, order_);
    for (const auto& [w, c] : coeffs_)
      if (alphabet_.weight(w) == weight) out.coeffs_.emplace(w, c);
    return out;
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check(o);
    for (const auto& [w, c] : o.coeffs_) add(w, c);
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check(o);
    for (const auto& [w, c] : o.coeffs_) add(w, c * Traits::from(Rational(-1)));
    return *this;
  }
  TruncatedSeries& operator*=(const S& c) {
    CoeffMap out;
    for (auto& [w, v] : coeffs_) {
      S p = v * c;
      if (!Traits::is_zero(p)) out.emplace(w, std::move(p));
    }
    coeffs_ = std::move(out);
    return *this;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, const S& c) { return a *= c; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check(b);
    TruncatedSeries out(a.alphabet_, a.order_);
    std::vector<std::pair<const Word*, int>> bw;
    bw.reserve(b.coeffs_.size());
    for (const auto& [w, c] : b.coeffs_) bw.emplace_back(&w, a.alphabet_.weight(w));
    for (const auto& [u, cu] : a.coeffs_) {
      int wu = a.alphabet_.weight(u);
      std::size_t j = 0;
      for (const auto& [v, cv] : b.coeffs_) {
        if (wu + bw[j++].second <= a.order_) out.add(u + v, cu * cv);
      }
    }
    return out;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void check(const TruncatedSeries& o) const {
    if (!(alphabet_ == o.alphabet_) || order_ != o.order_)
      throw std::invalid_argument("series over different alphabets or orders");
  }

  Alphabet alphabet_;
  int order_;
  CoeffMap coeffs_;
};

namespace detail {
inline int min_weight(const Alphabet& a) {
  int m = 1 << 20;
  for (int w : a.weights) m = std::min(m, w);
  return std::max(m, 1);
}
}  // namespace detail

template <class S>
TruncatedSeries<S> exp_series(const TruncatedSeries<S>& s) {
  using T = ScalarTraits<S>;
  if (!T::is_zero(s.coefficient(Word())))
    throw std::invalid_argument("exp_series: constant term must be zero");
  const auto& a = s.alphabet();
  TruncatedSeries<S> out = TruncatedSeries<S>::constant(a, s.order(), T::from(Rational(1)));
  TruncatedSeries<S> term = out;
  const int kmax = s.order() / detail::min_weight(a);
  for (int k = 1; k <= kmax; ++k) {
    term = term * s;
    term *= T::from(Rational(1, k));
    if (term.is_zero()) break;
    out += term;
  }
  return out;
}

template <class S>
TruncatedSeries<S> log_series(const TruncatedSeries<S>& s) {
  using T = ScalarTraits<S>;
  S c0 = s.coefficient(Word());
  if (!T::is_zero(c0 - T::from(Rational(1))))
    throw std::invalid_argument("log_series: constant term must be one");
  const auto& a = s.alphabet();
  TruncatedSeries<S> x = s;
  x.add(Word(), T::from(Rational(-1)));
  TruncatedSeries<S> out(a, s.order());
  TruncatedSeries<S> power = TruncatedSeries<S>::constant(a, s.order(), T::from(Rational(1)));
  const int kmax = s.order() / detail::min_weight(a);
  for (int k = 1; k <= kmax; ++k) {
    power = power * x;
    if (power.is_zero()) break;
    out += power * T::from(Rational(k % 2 ? 1 : -1, k));
  }
  return out;
}

/// Product of exp(f_0) exp(f_1) ... exp(f_{n-1}) as a series (operator order).
template <class S>
TruncatedSeries<S> exp_product(const std::vector<TruncatedSeries<S>>& factors) {
  if (factors.empty()) throw std::invalid_argument("exp_product: no factors");
  TruncatedSeries<S> p = exp_series(factors.front());
  for (std::size_t i = 1; i < factors.size(); ++i) p = p * exp_series(factors[i]);
  return p;
}

/// log(exp(f_0) exp(f_1) ...) truncated at the common order.
template <class S>
TruncatedSeries<S> gbch(const std::vector<TruncatedSeries<S>>& factors) {
  if (factors.size() == 1) return factors.front();
  return log_series(exp_product(factors));
}

// ---------------------------------------------------------------------------
// Lyndon basis

bool is_lyndon(const Word& w);

/// All Lyndon words of weight 1..m, ordered by (weight, lexicographic).
std::vector<Word> lyndon_words(const Alphabet& a, int m);

/// Standard factorization w = u v with v the longest proper Lyndon suffix.
std::pair<Word, Word> standard_factorization(const Word& w);

/// Expansion of the standard bracket of a Lyndon word into words.
const std::map<Word, long>& bracket_expansion(const Word& w);

/// "[A,[A,B]]" style name of the standard bracket.
std::string bracket_string(const Word& w, const Alphabet& a);

template <class S>
struct LieElement {
  Alphabet alphabet;
  int order = 0;
  std::vector<Word> basis;   // all Lyndon words up to `order`
  std::map<Word, S> coeffs;  // nonzero coordinates only
  TruncatedSeries<S> residual{Alphabet{}, 0};
  double residual_norm = 0.0;

  S coefficient(const Word& w) const {
    auto it = coeffs.find(w);
    return it == coeffs.end() ? ScalarTraits<S>::from(Rational(0)) : it->second;
  }
};

/// Triangular projection onto the Lyndon basis. Throws NotLieElement when the
/// remainder is nonzero (exact scalars) or its norm exceeds `tolerance`.
template <class S>
LieElement<S> project_to_lie(const TruncatedSeries<S>& s, double tolerance = 1e-9) {
  using T = ScalarTraits<S>;
  LieElement<S> out;
  out.alphabet = s.alphabet();
  out.order = s.order();
  out.basis = lyndon_words(s.alphabet(), s.order());
  TruncatedSeries<S> rem = s;
  for (const auto& w : out.basis) {
    S c = rem.coefficient(w);
    if (T::is_zero(c)) continue;
    for (const auto& [v, k] : bracket_expansion(w)) rem.add(v, c * T::from(Rational(-k)));
    out.coeffs.emplace(w, std::move(c));
  }
  out.residual = rem;
  if constexpr (T::exact) {
    out.residual_norm = rem.is_zero() ? 0.0 : INFINITY;
    if (!rem.is_zero()) throw NotLieElement("not a Lie element: nonzero remainder after projection");
  } else {
    double n2 = 0;
    for (const auto& [w, c] : rem.coeffs()) n2 += T::magnitude(c) * T::magnitude(c);
    out.residual_norm = std::sqrt(n2);
    if (out.residual_norm > tolerance)
      throw NotLieElement("not a Lie element: remainder norm " + std::to_string(out.residual_norm));
  }
  return out;
}

/// Coefficient of log(P) at each requested word, from the series P (constant 1)
/// through the composition formula; avoids forming the full logarithm.
template <class S>
std::map<Word, S> log_coefficients(const TruncatedSeries<S>& p, const std::vector<Word>& words) {
  using T = ScalarTraits<S>;
  std::map<Word, S> out;
  for (const auto& w : words) {
    const int n = static_cast<int>(w.size());
    // dp[j][k]: sum over splits of w[0, j) into k nonempty pieces
    std::vector<std::vector<S>> dp(n + 1, std::vector<S>(n + 1, T::from(Rational(0))));
    dp[0][0] = T::from(Rational(1));
    for (int j = 1; j <= n; ++j)
      for (int i = 0; i < j; ++i) {
        S piece = p.coefficient(w.substr(i, j - i));
        if (T::is_zero(piece)) continue;
        for (int k = 0; k < j; ++k)
          if (!T::is_zero(dp[i][k])) dp[j][k + 1] = dp[j][k + 1] + dp[i][k] * piece;
      }
    S total = T::from(Rational(0));
    for (int k = 1; k <= n; ++k)
      if (!T::is_zero(dp[n][k])) total = total + dp[n][k] * T::from(Rational(k % 2 ? 1 : -1, k));
    out.emplace(w, std::move(total));
  }
  return out;
}

/// Lyndon coordinates of log(P) without the residual check (P must be a
/// product of exponentials of Lie elements for the result to be meaningful).
template <class S>
std::map<Word, S> lie_coordinates_of_log(const TruncatedSeries<S>& p) {
  using T = ScalarTraits<S>;
  std::vector<Word> basis = lyndon_words(p.alphabet(), p.order());
  std::map<Word, S> s = log_coefficients(p, basis);
  std::map<Word, S> g;
  // g_w = s_w - sum_{u < w} g_u (bracket u)_w
  for (const auto& w : basis) {
    S c = s[w];
    for (const auto& [u, gu] : g) {
      if (u.size() != w.size() || !(u < w)) continue;
      const auto& ex = bracket_expansion(u);
      auto it = ex.find(w);
      if (it != ex.end()) c = c - gu * T::from(Rational(it->second));
    }
    g.emplace(w, std::move(c));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Bridge to operator polynomials

/// Evaluates the standard bracket of `w` with generator i mapped to images[i].
QuadPolynomial evaluate_bracket(const Word& w, const std::vector<QuadPolynomial>& images);
QuadPolynomial evaluate_lie(const LieElement<Rational>& e, const std::vector<QuadPolynomial>& images);
QuadPolynomial evaluate_series(const TruncatedSeries<Rational>& s, const std::vector<QuadPolynomial>& images);

/// Table of (bracket, coefficient) rows for debugging.
std::string dump_table(const LieElement<double>& e);

}  // namespace cvd
