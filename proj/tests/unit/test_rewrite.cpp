#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cvd/expression.hpp"
#include "cvd/rewrite.hpp"

using namespace cvd;

namespace {

QuadPolynomial X(int k = 1, int mode = 0, int n = 1) { return QuadPolynomial::x(mode, n, k); }
QuadPolynomial P(int k = 1, int mode = 0, int n = 1) { return QuadPolynomial::p(mode, n, k); }
GaussRational q(long a, long b = 1) { return GaussRational(Rational(a, b)); }
GaussRational iq(long a, long b = 1) { return GaussRational(Rational(0), Rational(a, b)); }

QuadPolynomial random_hermitian(std::mt19937& rng, int n_modes, int max_degree) {
  std::uniform_int_distribution<int> count(1, 4), coeff(-3, 3), deg(0, max_degree);
  QuadPolynomial h(n_modes);
  for (int t = count(rng); t > 0; --t) {
    Monomial m;
    m.exps.assign(2 * n_modes, 0);
    int budget = deg(rng);
    std::uniform_int_distribution<int> slot(0, 2 * n_modes - 1);
    for (int k = 0; k < budget; ++k) ++m.exps[slot(rng)];
    QuadPolynomial term = QuadPolynomial::term(m, GaussRational(Rational(coeff(rng), 2), Rational(coeff(rng), 3)));
    h += term + term.adjoint();
  }
  return h;
}

std::vector<std::string> evaluated_terms(const RewritePlan& p) {
  std::vector<std::string> out;
  for (const auto& t : p.trees) out.push_back((t.tree->evaluate() * t.weight).to_string());
  for (const auto& t : p.direct_terms) out.push_back((t.tree->evaluate() * t.weight).to_string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Rewrite, PowerTrees) {
  auto t4 = power_tree(4);
  EXPECT_EQ(t4.weight, q(-2, 9));
  EXPECT_EQ(t4.tree->to_string(), "[X0^3,[X0^3,P0^2]]");
  EXPECT_TRUE(power_tree(3).tree->is_leaf());
  EXPECT_TRUE(power_tree(2).tree->is_leaf());
  for (int m = 1; m <= 9; ++m) EXPECT_EQ(power_tree(m).tree->evaluate() * power_tree(m).weight, X(m)) << m;
  EXPECT_THROW(power_tree(0), std::invalid_argument);
}

TEST(Rewrite, SymmetricPairs) {
  auto p11 = symmetric_pair_trees(1, 1);
  ASSERT_EQ(p11.trees.size(), 1u);
  EXPECT_EQ(p11.trees[0].weight, iq(-1));
  EXPECT_EQ(p11.trees[0].tree->to_string(), "[X0^2,P0^2]");
  EXPECT_EQ(p11.global_phase, 0);

  auto p22 = symmetric_pair_trees(2, 2);
  ASSERT_EQ(p22.trees.size(), 1u);
  EXPECT_EQ(p22.trees[0].weight, iq(-4, 9));
  EXPECT_EQ(p22.trees[0].tree->to_string(), "[X0^3,P0^3]");
  EXPECT_EQ(p22.global_phase, Rational(-1, 6));

  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n)
      EXPECT_EQ(symmetric_pair_trees(m, n).evaluate(), X(m) * P(n) + P(n) * X(m)) << m << "," << n;
  // Jacobi merge leaves one nested-sum tree for n = 3
  EXPECT_EQ(symmetric_pair_trees(3, 3).trees.size(), 2u);
}

TEST(Rewrite, GeneralTerms) {
  auto a = general_term_trees(GaussRational(1), 4, 0);
  ASSERT_EQ(a.trees.size(), 1u);
  EXPECT_EQ(a.evaluate(), X(4) * q(2));
  auto b = general_term_trees(GaussRational::i_unit(), 1, 1);
  EXPECT_TRUE(b.trees.empty());
  EXPECT_TRUE(b.direct_terms.empty());
  EXPECT_EQ(b.global_phase, Rational(-1, 2));
  auto c = general_term_trees(GaussRational(Rational(1, 3), Rational(2, 5)), 3, 2);
  QuadPolynomial term = X(3) * P(2) * GaussRational(Rational(1, 3), Rational(2, 5));
  EXPECT_EQ(c.evaluate(), term + term.adjoint());
}

TEST(Rewrite, TwoModeTrees) {
  auto t = two_mode_tree(2, 2);
  EXPECT_EQ(t.weight, q(-4, 9));
  EXPECT_EQ(t.tree->to_string(), "[P1^3,[P0^3,X0 X1]]");
  for (int n = 1; n <= 3; ++n)
    for (int s = 1; s <= 3; ++s) {
      auto w = two_mode_tree(n, s);
      EXPECT_EQ(w.tree->evaluate() * w.weight, P(n, 0, 2) * P(s, 1, 2));
    }
}

TEST(Rewrite, KerrPlan) {
  QuadPolynomial kerr = parse_polynomial("(X0^2+P0^2)^2");
  auto p = plan(kerr);
  ASSERT_EQ(p.trees.size(), 3u);
  EXPECT_TRUE(p.direct_terms.empty());
  EXPECT_EQ(p.trees[0].weight, q(-2, 9));
  EXPECT_EQ(p.trees[0].tree->to_string(), "[X0^3,[X0^3,P0^2]]");
  EXPECT_EQ(p.trees[1].weight, q(-2, 9));
  EXPECT_EQ(p.trees[1].tree->to_string(), "[P0^3,[P0^3,X0^2]]");
  EXPECT_EQ(p.trees[2].weight, iq(-4, 9));
  EXPECT_EQ(p.trees[2].tree->to_string(), "[X0^3,P0^3]");
  EXPECT_EQ(p.evaluate(), kerr);
}

TEST(Rewrite, DirectAndCrossKerr) {
  auto cubic = plan(X(3));
  EXPECT_TRUE(cubic.trees.empty());
  ASSERT_EQ(cubic.direct_terms.size(), 1u);

  QuadPolynomial ck = parse_polynomial("(X0^2+P0^2)*(X1^2+P1^2)");
  auto p = plan(ck);
  EXPECT_EQ(p.trees.size(), 4u);
  EXPECT_EQ(p.evaluate(), ck);
  for (const auto& t : p.trees) EXPECT_EQ(t.tree->brackets(), 2) << t.tree->to_string();
}

TEST(Rewrite, DownConversionPlan) {
  QuadPolynomial h = parse_polynomial("X0^2 X1 - P0^2 X1 + (X0 P0 + P0 X0) P1");
  auto p = plan(h);
  EXPECT_EQ(p.evaluate(), h);
  EXPECT_EQ(p.direct_terms.size(), 2u);
  ASSERT_EQ(p.trees.size(), 1u);
  EXPECT_EQ(p.trees[0].tree->to_string(), "[X0^2 P1,P0^2]");
}

TEST(Rewrite, RoundTripOnRandomHermitian) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 40; ++i) {
    QuadPolynomial h = random_hermitian(rng, 1 + i % 2, 6);
    RewritePlan p = plan(h);
    EXPECT_EQ(p.evaluate(), h) << h.to_string();
    for (const auto& t : p.direct_terms) EXPECT_TRUE(is_realizable_leaf(t.tree->leaf));
    for (const auto& t : p.trees) {
      GaussRational ratio = t.weight / t.tree->phase_factor();
      EXPECT_TRUE(ratio.is_real()) << t.tree->to_string();
    }
  }
}

TEST(Rewrite, FourierCovariance) {
  std::mt19937 rng(99);
  for (int i = 0; i < 15; ++i) {
    QuadPolynomial h = random_hermitian(rng, 1, 5);
    RewritePlan p = plan(h);
    RewritePlan f = plan(fourier_conjugate(h, 0));
    RewritePlan g = p;
    for (auto& t : g.trees) t = fourier_image(t, 0);
    for (auto& t : g.direct_terms) t = fourier_image(t, 0);
    EXPECT_EQ(evaluated_terms(f), evaluated_terms(g)) << h.to_string();
    EXPECT_EQ(f.global_phase, p.global_phase);
  }
}

TEST(Rewrite, TextRoundTrip) {
  auto p = plan(parse_polynomial("(X0^2+P0^2)^2 + X0 X1 + P1^3"));
  auto back = RewritePlan::from_text(p.to_text());
  EXPECT_EQ(back.to_text(), p.to_text());
  EXPECT_EQ(back.evaluate(), p.evaluate());
}

TEST(Rewrite, RejectsBadInput) {
  EXPECT_THROW(plan(X(1) * P(1)), std::invalid_argument);
  QuadPolynomial three = QuadPolynomial::x(0, 3) * QuadPolynomial::x(1, 3) * QuadPolynomial::x(2, 3);
  EXPECT_THROW(plan(three), UnsupportedError);
}

TEST(ExactSequences, Shapes) {
  auto x2 = exact_x2_sequence(0.3);
  EXPECT_EQ(x2.elementary_count(), 5);
  EXPECT_NEAR(x2.global_phase, -0.0081 / 27, 1e-15);
  auto zero = exact_x2_sequence(0.0);
  EXPECT_EQ(zero.size(), 0u);
  EXPECT_EQ(zero.global_phase, 0.0);
  EXPECT_EQ(exact_pdc_sequence(0.2, 0.5).elementary_count(), 7);
  EXPECT_EQ(exact_pdc_sequence(0.0, 0.5).size(), 0u);
  EXPECT_EQ(exact_pdc_sequence(0.2, 0.0).size(), 0u);
  EXPECT_EQ(conjugation_sequence(0.2).elementary_count(), 3);
}

TEST(ExactSequences, ConjugationExponent) {
  Rational t(1, 5);
  QuadPolynomial expect = P(2) * GaussRational(t) - (P(1) * X(2) + X(2) * P(1)) * GaussRational(Rational(3, 2) * t * t) +
                          X(4) * GaussRational(Rational(9, 4) * t * t * t);
  EXPECT_EQ(conjugation_exponent(t), expect);
}

TEST(ExactSequences, LeafFrames) {
  Monomial m = leaf_monomial(0, 2, true, 1);
  m.exps[2] = 1;  // P0 X1
  auto s = leaf_sequence(m, 0.4, 2);
  EXPECT_EQ(s.elementary_count(), 1);
  EXPECT_EQ(s.fourier_count(), 4);
  EXPECT_THROW(leaf_sequence(leaf_monomial(0, 1, false, 4), 0.1, 1), std::invalid_argument);
}
