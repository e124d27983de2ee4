#include <gtest/gtest.h>

#include <random>

#include "cvd/free_lie.hpp"

using namespace cvd;
using Series = TruncatedSeries<double>;
using ExactSeries = TruncatedSeries<Rational>;

namespace {

const Alphabet AB = Alphabet::plain({"A", "B"});
const Word A{char(0)}, B{char(1)};

int mobius(int n) {
  int r = 1;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      r = -r;
    }
  return n > 1 ? -r : r;
}

// Witt's necklace formula, independent of the enumeration.
long witt(int k, int n) {
  long s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) {
      long p = 1;
      for (int i = 0; i < n / d; ++i) p *= k;
      s += mobius(d) * p;
    }
  return s / n;
}

Series random_lie_exponent(std::mt19937& rng, const Alphabet& a, int m) {
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  Series s(a, m);
  for (int g = 0; g < a.size(); ++g) s += Series::generator(a, m, g, u(rng));
  return s;
}

}  // namespace

TEST(FreeLie, ExpLogBasics) {
  Series zero(AB, 4);
  EXPECT_EQ(exp_series(zero), Series::constant(AB, 4, 1.0));
  EXPECT_TRUE(log_series(Series::constant(AB, 4, 1.0)).is_zero());
  EXPECT_THROW(exp_series(Series::constant(AB, 4, 1.0)), std::invalid_argument);
  EXPECT_THROW(log_series(zero), std::invalid_argument);
  ExactSeries x = ExactSeries::generator(AB, 5, 0, Rational(1, 3)) + ExactSeries::generator(AB, 5, 1, Rational(-2));
  EXPECT_EQ(log_series(exp_series(x)), x);
}

TEST(FreeLie, TwoFactorSecondOrder) {
  // Oracle: (1 + tA + t^2 A^2/2)(1 + tB + t^2 B^2/2) - 1 = X; log = X - X^2/2 at order 2.
  Rational t(3, 10);
  ExactSeries l = gbch<Rational>({ExactSeries::generator(AB, 2, 0, t), ExactSeries::generator(AB, 2, 1, t)});
  ExactSeries expect(AB, 2);
  expect.add(A, t);
  expect.add(B, t);
  expect.add(A + B, t * t / 2);
  expect.add(B + A, -t * t / 2);
  EXPECT_EQ(l, expect);
  auto lie = project_to_lie(l);
  EXPECT_EQ(lie.coefficient(A), t);
  EXPECT_EQ(lie.coefficient(B), t);
  EXPECT_EQ(lie.coefficient(A + B), t * t / 2);
  EXPECT_EQ(lie.residual_norm, 0.0);
}

TEST(FreeLie, SingleFactorUnchanged) {
  Series f = Series::generator(AB, 6, 0, 0.4);
  EXPECT_EQ(gbch<double>({f}), f);
}

TEST(FreeLie, CommutatorSecondOrderScheme) {
  using C = std::complex<double>;
  using CS = TruncatedSeries<C>;
  const double t = 0.37;
  const C it(0, t);
  CS l = gbch<C>({CS::generator(AB, 3, 1, it), CS::generator(AB, 3, 0, it), CS::generator(AB, 3, 1, -it),
                  CS::generator(AB, 3, 0, -it)});
  auto two = l.homogeneous_part(2);
  EXPECT_NEAR(std::abs(two.coefficient(A + B) - C(t * t)), 0, 1e-15);
  EXPECT_NEAR(std::abs(two.coefficient(B + A) + C(t * t)), 0, 1e-15);
  EXPECT_EQ(two.coeffs().size(), 2u);
  EXPECT_TRUE(l.homogeneous_part(1).is_zero());
}

TEST(FreeLie, LyndonCounts) {
  EXPECT_EQ(lyndon_words(AB, 2).size(), 3u);
  EXPECT_EQ(lyndon_words(AB, 4).size(), 8u);
  EXPECT_EQ(lyndon_words(AB, 5).size(), 14u);
  for (int k = 1; k <= 3; ++k) {
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back(std::string(1, char('A' + i)));
    Alphabet a = Alphabet::plain(names);
    for (int m = 1; m <= 7; ++m) {
      long expect = 0;
      for (int n = 1; n <= m; ++n) expect += witt(k, n);
      EXPECT_EQ(static_cast<long>(lyndon_words(a, m).size()), expect) << k << "," << m;
    }
  }
  EXPECT_EQ(bracket_string(A + A + B, AB), "[A,[A,B]]");
  EXPECT_EQ(bracket_string(A + B + B, AB), "[[A,B],B]");
  EXPECT_EQ(bracket_string(A + A + B + A + B, AB), "[[A,[A,B]],[A,B]]");
}

TEST(FreeLie, ProjectionRejectsNonLie) {
  ExactSeries ab(AB, 2);
  ab.add(A + B, Rational(1));
  EXPECT_THROW(project_to_lie(ab), NotLieElement);
}

TEST(FreeLie, FriedrichsCriterionRandom) {
  std::mt19937 rng(11);
  Alphabet abc = Alphabet::plain({"A", "B", "C"});
  for (int trial = 0; trial < 30; ++trial) {
    const Alphabet& a = trial % 3 == 0 ? abc : AB;
    int m = 2 + trial % 5;
    std::vector<Series> f;
    for (int i = 0; i < 6; ++i) f.push_back(random_lie_exponent(rng, a, m));
    auto lie = project_to_lie(gbch(f), 1e-12);
    EXPECT_LT(lie.residual_norm, 1e-12);
  }
}

TEST(FreeLie, InversePairCancels) {
  std::mt19937 rng(3);
  for (int m = 1; m <= 6; ++m) {
    Series s = random_lie_exponent(rng, AB, m);
    Series l = gbch<double>({s, s * -1.0});
    for (const auto& [w, c] : l.coeffs()) EXPECT_NEAR(c, 0.0, 1e-15);
  }
}

TEST(FreeLie, SymbolicAnsatzCoefficientsArePolynomials) {
  // 10-gate alternating ansatz e^{c1 a} e^{c1' b} ... at order 4
  const int m = 4;
  std::vector<TruncatedSeries<MultiPoly>> f;
  for (int i = 0; i < 10; ++i)
    f.push_back(TruncatedSeries<MultiPoly>::generator(AB, m, i % 2, MultiPoly::variable(i)));
  auto sym = lie_coordinates_of_log(exp_product(f));
  EXPECT_EQ(sym.size(), 8u);
  for (const auto& [w, p] : sym) EXPECT_EQ(p.total_degree(), static_cast<int>(w.size()));

  // numeric route at a random point
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> x(10);
  for (auto& v : x) v = u(rng);
  std::vector<Series> nf;
  for (int i = 0; i < 10; ++i) nf.push_back(Series::generator(AB, m, i % 2, x[i]));
  auto num = project_to_lie(gbch(nf), 1e-12);
  for (const auto& [w, p] : sym) EXPECT_NEAR(p.evaluate(x), num.coefficient(w), 1e-12) << AB.spell(w);
}

TEST(FreeLie, CompositionRouteMatchesFullLog) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Series> f;
    for (int i = 0; i < 5; ++i) f.push_back(random_lie_exponent(rng, AB, 6));
    Series p = exp_product(f);
    auto full = project_to_lie(log_series(p), 1e-12);
    auto fast = lie_coordinates_of_log(p);
    for (const auto& w : full.basis) EXPECT_NEAR(fast[w], full.coefficient(w), 1e-13);
  }
}

TEST(FreeLie, WeightedTruncation) {
  Alphabet g{{"Z", "E"}, {2, 6}};
  auto words = lyndon_words(g, 9);
  std::vector<std::string> spelled;
  for (const auto& w : words) spelled.push_back(g.spell(w));
  EXPECT_EQ(spelled, (std::vector<std::string>{"Z", "E", "ZE"}));
  TruncatedSeries<double> z = TruncatedSeries<double>::generator(g, 9, 0, 1.0);
  EXPECT_EQ(exp_series(z).coeffs().size(), 5u);  // 1, Z, ZZ, ZZZ, ZZZZ
}

TEST(FreeLie, EvaluateBracketBridge) {
  QuadPolynomial x3 = QuadPolynomial::x(0, 1, 3), p2 = QuadPolynomial::p(0, 1, 2);
  EXPECT_EQ(evaluate_bracket(A + A + B, {x3, p2}), commutator(x3, commutator(x3, p2)));
  EXPECT_EQ(evaluate_bracket(A + B + B, {x3, p2}), commutator(commutator(x3, p2), p2));
}
