#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvd/gates.hpp"
#include "cvd/quad_polynomial.hpp"

namespace cvd {

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommutatorTree;
using TreePtr = std::shared_ptr<const CommutatorTree>;

/// Leaf: a monomial with a single quadrature per mode (X^j or P^j), on one
/// mode or a mode pair. Bracket: [left, right].
struct CommutatorTree {
  Monomial leaf;  // valid when left is null
  TreePtr left, right;

  static TreePtr make_leaf(const Monomial& m);
  static TreePtr make_bracket(TreePtr l, TreePtr r);

  bool is_leaf() const { return !left; }
  int n_modes() const;
  int brackets() const;
  /// i^brackets: phi * tree is Hermitian when the leaves are.
  GaussRational phase_factor() const;
  QuadPolynomial evaluate() const;
  std::string to_string() const;
};

bool same_tree(const TreePtr& a, const TreePtr& b);

/// Realizable by the elementary set: X^j / P^j (j <= 3) on one mode, or on two
/// modes Q_a Q_b (controlled-phase frame) or Q_a^2 Q_b (down-conversion frame).
bool is_realizable_leaf(const Monomial& m);

/// Single-mode monomial with one quadrature.
Monomial leaf_monomial(int mode, int n_modes, bool is_p, int power);

struct WeightedTree {
  GaussRational weight;
  TreePtr tree;
};

struct RewritePlan {
  int n_modes = 1;
  std::vector<WeightedTree> trees;
  std::vector<WeightedTree> direct_terms;  // leaves with real weight
  Rational global_phase;

  QuadPolynomial evaluate() const;
  /// One line per entry: `tree <weight> <bracket>`, `direct <weight> <leaf>`,
  /// `phase <value>`.
  std::string to_text() const;
  static RewritePlan from_text(const std::string& text);
};

/// Fourier image of a tree on `mode` (X -> P, P -> -X per quarter turn); leaf
/// signs are moved into the returned weight.
WeightedTree fourier_image(const WeightedTree& t, int mode, int quarter_turns = 1);

/// X^m on `mode`: a leaf for m <= 3, otherwise -2/(3(m-1)) [X^{m-1},[X^3,P^2]]
/// with X^{m-1} expanded recursively.
WeightedTree power_tree(int m, int mode = 0, int n_modes = 1);

/// X^m P^n + P^n X^m on one mode.
RewritePlan symmetric_pair_trees(int m, int n, int mode = 0, int n_modes = 1);

/// c X^m P^n + c* P^n X^m on one mode.
RewritePlan general_term_trees(const GaussRational& c, int m, int n, int mode = 0, int n_modes = 1);

/// P_a^n P_b^s as -4/((n+1)(s+1)) [P_b^{s+1},[P_a^{n+1}, X_a X_b]].
WeightedTree two_mode_tree(int n, int s, int mode_a = 0, int mode_b = 1, int n_modes = 2);

/// Complete exact rewrite of a Hermitian polynomial; monomials may touch at
/// most two modes.
RewritePlan plan(const QuadPolynomial& h);

// ---------------------------------------------------------------------------
// Exact gate identities

/// e^{i t^2 X^2} without the quadratic gate (five gates plus a phase).
GateSequence exact_x2_sequence(double t, int mode = 0, int n_modes = 1);

/// e^{(3/2) i k alpha^2 X_a^2 P_b} from cubic and controlled-phase gates.
GateSequence exact_pdc_sequence(double k, double alpha, int mode_a = 0, int mode_b = 1, int n_modes = 2);

/// e^{i t X^3} e^{i t P^2} e^{-i t X^3} = e^{i t (P - (3t/2) X^2)^2}.
GateSequence conjugation_sequence(double t, int mode = 0, int n_modes = 1);
/// t (P - (3t/2) X^2)^2, the exponent realized by conjugation_sequence.
QuadPolynomial conjugation_exponent(const Rational& t);

/// Gates for e^{i s L} with L a realizable leaf.
GateSequence leaf_sequence(const Monomial& leaf, double s, int n_modes);

}  // namespace cvd
