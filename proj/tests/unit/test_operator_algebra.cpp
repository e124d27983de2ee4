#include <gtest/gtest.h>

#include <map>
#include <random>

#include "cvd/expression.hpp"
#include "cvd/quad_polynomial.hpp"

using namespace cvd;

namespace {

QuadPolynomial X(int k = 1) { return QuadPolynomial::x(0, 1, k); }
QuadPolynomial P(int k = 1) { return QuadPolynomial::p(0, 1, k); }
GaussRational q(long n, long d = 1) { return GaussRational(Rational(n, d)); }
GaussRational iq(long n, long d = 1) { return GaussRational(Rational(0), Rational(n, d)); }
QuadPolynomial S(const GaussRational& c) { return QuadPolynomial::scalar(c); }

// Independent oracle: X acts as multiplication by x, P as -(i/2) d/dx on
// polynomials in x. Differential operators are determined by their action on
// 1, x, x^2, ...
using XPoly = std::map<int, GaussRational>;

XPoly apply_letter(bool is_p, const XPoly& f) {
  XPoly out;
  for (const auto& [e, c] : f) {
    if (!is_p) {
      out[e + 1] += c;
    } else if (e > 0) {
      out[e - 1] += c * GaussRational(e) * iq(-1, 2);
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

XPoly apply_poly(const QuadPolynomial& op, const XPoly& f) {
  XPoly out;
  for (const auto& [m, c] : op.terms()) {
    XPoly g = f;
    for (int i = 0; i < m.p(0); ++i) g = apply_letter(true, g);
    for (int i = 0; i < m.x(0); ++i) g = apply_letter(false, g);
    for (const auto& [e, v] : g) out[e] += c * v;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

XPoly apply_word(const std::vector<bool>& word, const XPoly& f) {
  XPoly g = f;
  for (auto it = word.rbegin(); it != word.rend(); ++it) g = apply_letter(*it, g);
  return g;
}

}  // namespace

TEST(OperatorAlgebra, CanonicalizeExamples) {
  EXPECT_EQ(QuadPolynomial::canonicalize({{0, false}}, 1), X());
  EXPECT_EQ(QuadPolynomial::canonicalize({{0, true}, {0, false}}, 1), X() * P() - S(iq(1, 2)));
  EXPECT_EQ(QuadPolynomial::canonicalize({{0, false}, {0, true}, {0, false}}, 1),
            X(2) * P() - iq(1, 2) * X());
  // cross-mode letters commute
  EXPECT_EQ(QuadPolynomial::canonicalize({{1, true}, {0, false}}, 2),
            QuadPolynomial::canonicalize({{0, false}, {1, true}}, 2));
}

TEST(OperatorAlgebra, WordsAgreeWithDifferentialOracle) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int len = 1 + static_cast<int>(rng() % 7);
    std::vector<bool> word;
    std::vector<Letter> letters;
    for (int i = 0; i < len; ++i) {
      bool p = rng() % 2;
      word.push_back(p);
      letters.push_back({0, p});
    }
    QuadPolynomial op = QuadPolynomial::canonicalize(letters, 1);
    for (int e = 0; e <= 8; ++e) {
      XPoly f{{e, GaussRational(1)}};
      EXPECT_EQ(apply_poly(op, f), apply_word(word, f));
    }
  }
}

TEST(OperatorAlgebra, MultiplyExamples) {
  EXPECT_EQ(X() * S(q(1)), X());
  EXPECT_EQ(P() * X(), X() * P() - S(iq(1, 2)));
  EXPECT_EQ(X(2) * P(2), QuadPolynomial::canonicalize({{0, false}, {0, false}, {0, true}, {0, true}}, 1));
}

TEST(OperatorAlgebra, CommutatorExamples) {
  EXPECT_EQ(commutator(X(), P()), S(iq(1, 2)));
  EXPECT_TRUE(commutator(X(3), X()).is_zero());
  EXPECT_EQ(commutator(X(3), P(2)), iq(3) * X(2) * P() + q(3, 2) * X());
}

TEST(OperatorAlgebra, CommutatorMatchesSumFormula) {
  // [X^m, P^n] = (im/2) sum_k P^k X^(m-1) P^(n-k-1)
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n) {
      QuadPolynomial sum(1);
      for (int k = 0; k < n; ++k) sum += P(k) * X(m - 1) * P(n - k - 1);
      EXPECT_EQ(commutator(X(m), P(n)), iq(m, 2) * sum) << m << "," << n;
    }
}

TEST(OperatorAlgebra, AdjointAndHermiticity) {
  EXPECT_TRUE(X(3).is_hermitian());
  EXPECT_FALSE((X() * P()).is_hermitian());
  EXPECT_EQ((X() * P()).adjoint(), X() * P() - S(iq(1, 2)));
  EXPECT_TRUE((iq(1) * commutator(X(3), P(3))).is_hermitian());
  QuadPolynomial two = QuadPolynomial::x(0, 2) * QuadPolynomial::p(0, 2) * QuadPolynomial::p(1, 2, 2);
  EXPECT_EQ(two.adjoint().adjoint(), two);
}

TEST(OperatorAlgebra, FourierConjugate) {
  EXPECT_EQ(fourier_conjugate(X(), 0), P());
  EXPECT_EQ(fourier_conjugate(X(2), 0), P(2));
  EXPECT_EQ(fourier_conjugate(P(), 0), -X());
  QuadPolynomial h = X(2) * P() + q(2) * P(3) + S(q(1, 3));
  EXPECT_EQ(fourier_conjugate(h, 0, 4), h);
  EXPECT_EQ(fourier_conjugate(fourier_conjugate(h, 0), 0, -1), h);
  QuadPolynomial a = X(3), b = X() * P(2);
  EXPECT_EQ(fourier_conjugate(commutator(a, b), 0),
            commutator(fourier_conjugate(a, 0), fourier_conjugate(b, 0)));
}

TEST(OperatorAlgebra, AntisymmetryAndJacobiOnCorpus) {
  std::vector<QuadPolynomial> corpus;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      if (a + b >= 1 && a + b <= 6) corpus.push_back(X(a) * P(b));
  for (const auto& p : corpus)
    for (const auto& r : corpus) {
      EXPECT_EQ(commutator(p, r), -commutator(r, p));
    }
  for (std::size_t i = 0; i < corpus.size(); i += 2)
    for (std::size_t j = 1; j < corpus.size(); j += 3)
      for (std::size_t k = 0; k < corpus.size(); k += 4) {
        const auto &a = corpus[i], &b = corpus[j], &c = corpus[k];
        QuadPolynomial jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                             commutator(c, commutator(a, b));
        EXPECT_TRUE(jac.is_zero());
      }
}

TEST(OperatorAlgebra, PowerRaisingIdentity) {
  for (int m = 2; m <= 8; ++m) {
    QuadPolynomial lhs = GaussRational(Rational(-2, 3 * (m - 1))) *
                         commutator(X(m - 1), commutator(X(3), P(2)));
    EXPECT_EQ(lhs, X(m)) << m;
  }
}

TEST(OperatorAlgebra, SymmetricPairIdentity) {
  for (int m = 1; m <= 5; ++m)
    for (int n = 1; n <= 5; ++n) {
      QuadPolynomial lhs =
          GaussRational(Rational(0), Rational(-4, (n + 1) * (m + 1))) * commutator(X(m + 1), P(n + 1));
      QuadPolynomial sum(1);
      for (int k = 1; k <= n - 1; ++k) sum += commutator(P(n - k), commutator(X(m), P(k)));
      lhs -= GaussRational(Rational(1, n + 1)) * sum;
      EXPECT_EQ(lhs, X(m) * P(n) + P(n) * X(m)) << m << "," << n;
    }
}

TEST(OperatorAlgebra, JacobiSymmetryOfNestedSum) {
  for (int m = 1; m <= 4; ++m)
    for (int n = 2; n <= 5; ++n)
      for (int k = 1; k < n; ++k)
        EXPECT_EQ(commutator(P(n - k), commutator(X(m), P(k))),
                  commutator(P(k), commutator(X(m), P(n - k))));
}

TEST(OperatorAlgebra, KerrRelations) {
  EXPECT_EQ(q(-2, 9) * commutator(X(3), commutator(X(3), P(2))), X(4));
  QuadPolynomial d = X(2) * P(2) + P(2) * X(2) + iq(4, 9) * commutator(X(3), P(3));
  EXPECT_TRUE(d.is_scalar());
  EXPECT_EQ(d.scalar_part(), q(-1, 6));
}

TEST(OperatorAlgebra, TwoModeIdentity) {
  for (int n = 1; n <= 3; ++n)
    for (int s = 1; s <= 3; ++s) {
      QuadPolynomial xx = QuadPolynomial::x(0, 2) * QuadPolynomial::x(1, 2);
      QuadPolynomial lhs = GaussRational(Rational(-4, (n + 1) * (s + 1))) *
                           commutator(QuadPolynomial::p(1, 2, s + 1),
                                      commutator(QuadPolynomial::p(0, 2, n + 1), xx));
      EXPECT_EQ(lhs, QuadPolynomial::p(0, 2, n) * QuadPolynomial::p(1, 2, s));
    }
}

TEST(Expression, ParsesAndRoundTrips) {
  QuadPolynomial kerr = parse_polynomial("(X0^2+P0^2)^2");
  EXPECT_EQ(kerr, power(X(2) + P(2), 2));
  EXPECT_EQ(parse_polynomial("P X"), X() * P() - S(iq(1, 2)));
  EXPECT_EQ(parse_polynomial("3/4i"), S(iq(3, 4)));
  EXPECT_EQ(parse_polynomial("2 - 0.5 X"), S(q(2)) - q(1, 2) * X());
  EXPECT_EQ(parse_polynomial("X1 P0").n_modes(), 2);
  std::vector<QuadPolynomial> samples = {
      kerr, iq(1) * commutator(X(3), P(3)), X(2) * P() * iq(-3, 7) + S(GaussRational(Rational(1, 2), Rational(-5, 3))),
      QuadPolynomial::x(0, 2, 2) * QuadPolynomial::p(1, 2) - QuadPolynomial::p(0, 2) * q(7)};
  for (const auto& s : samples) EXPECT_EQ(parse_polynomial(s.to_string(), s.n_modes()), s) << s.to_string();
}

TEST(Expression, ReportsPosition) {
  try {
    parse_polynomial("X0 +\n  (P0 * $)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 9);
  }
  EXPECT_THROW(parse_polynomial("(X0"), ParseError);
  EXPECT_THROW(parse_polynomial("X0^-1"), ParseError);
}
