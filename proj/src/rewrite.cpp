#include "cvd/rewrite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cvd/expression.hpp"

namespace cvd {

// ---------------------------------------------------------------------------
// Trees

TreePtr CommutatorTree::make_leaf(const Monomial& m) {
  auto t = std::make_shared<CommutatorTree>();
  t->leaf = m;
  return t;
}

TreePtr CommutatorTree::make_bracket(TreePtr l, TreePtr r) {
  if (!l || !r) throw std::invalid_argument("bracket with an empty child");
  auto t = std::make_shared<CommutatorTree>();
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}

int CommutatorTree::n_modes() const { return is_leaf() ? leaf.n_modes() : left->n_modes(); }

int CommutatorTree::brackets() const { return is_leaf() ? 0 : 1 + left->brackets() + right->brackets(); }

GaussRational CommutatorTree::phase_factor() const {
  static const GaussRational table[4] = {GaussRational(1), GaussRational::i_unit(), GaussRational(-1),
                                         -GaussRational::i_unit()};
  return table[brackets() % 4];
}

QuadPolynomial CommutatorTree::evaluate() const {
  if (is_leaf()) return QuadPolynomial::term(leaf, GaussRational(1));
  return commutator(left->evaluate(), right->evaluate());
}

std::string CommutatorTree::to_string() const {
  if (is_leaf()) return monomial_to_string(leaf);
  return "[" + left->to_string() + "," + right->to_string() + "]";
}

bool same_tree(const TreePtr& a, const TreePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->is_leaf() != b->is_leaf()) return false;
  if (a->is_leaf()) return a->leaf == b->leaf;
  return same_tree(a->left, b->left) && same_tree(a->right, b->right);
}

bool is_realizable_leaf(const Monomial& m) {
  std::vector<int> deg;
  for (int k = 0; k < m.n_modes(); ++k) {
    if (m.x(k) > 0 && m.p(k) > 0) return false;
    if (m.degree(k) > 0) deg.push_back(m.degree(k));
  }
  if (deg.size() == 1) return deg[0] <= 3;
  if (deg.size() == 2) return deg[0] + deg[1] <= 3;
  return false;
}

Monomial leaf_monomial(int mode, int n_modes, bool is_p, int power) {
  if (mode < 0 || mode >= n_modes) throw std::out_of_range("leaf mode out of range");
  Monomial m;
  m.exps.assign(2 * n_modes, 0);
  m.exps[2 * mode + (is_p ? 1 : 0)] = static_cast<std::uint16_t>(power);
  return m;
}

namespace {

TreePtr leaf(int mode, int n_modes, bool is_p, int power) {
  return CommutatorTree::make_leaf(leaf_monomial(mode, n_modes, is_p, power));
}

WeightedTree bracket(const WeightedTree& a, const WeightedTree& b) {
  return {a.weight * b.weight, CommutatorTree::make_bracket(a.tree, b.tree)};
}

// One quarter turn X -> P, P -> -X on `mode`; returns the sign picked up.
TreePtr rotate(const TreePtr& t, int mode, int& sign) {
  if (!t->is_leaf())
    return CommutatorTree::make_bracket(rotate(t->left, mode, sign), rotate(t->right, mode, sign));
  Monomial m = t->leaf;
  const int x = m.x(mode), p = m.p(mode);
  if (x == 0 && p == 0) return t;
  if (p % 2) sign = -sign;
  m.exps[2 * mode] = static_cast<std::uint16_t>(p);
  m.exps[2 * mode + 1] = static_cast<std::uint16_t>(x);
  return CommutatorTree::make_leaf(m);
}

WeightedTree expand_power(int mode, int n_modes, bool is_p, int power) {
  WeightedTree x = power_tree(power, mode, n_modes);
  return is_p ? fourier_image(x, mode, 1) : x;
}

void add_scalar(RewritePlan& p, const GaussRational& c) {
  if (!c.is_real()) throw std::logic_error("rewrite produced a non-real phase");
  p.global_phase += c.re;
}

// Routes a weighted tree to the phase, the direct terms or the tree list.
void add_tree(RewritePlan& p, const GaussRational& w, const TreePtr& t) {
  if (w.is_zero()) return;
  if (t->is_leaf()) {
    if (!w.is_real()) throw std::logic_error("rewrite produced a non-Hermitian direct term");
    if (t->leaf.is_identity()) {
      add_scalar(p, w);
      return;
    }
    p.direct_terms.push_back({w, t});
    return;
  }
  QuadPolynomial v = t->evaluate() * w;
  if (v.is_zero()) return;
  QuadPolynomial rest = v.without_scalar();
  if (rest.is_zero()) {
    add_scalar(p, v.scalar_part());
    return;
  }
  if (rest.terms().size() == 1) {
    const auto& [m, c] = *rest.terms().begin();
    if (c.is_real() && is_realizable_leaf(m)) {
      add_scalar(p, v.scalar_part());
      p.direct_terms.push_back({c, CommutatorTree::make_leaf(m)});
      return;
    }
  }
  p.trees.push_back({w, t});
}

void append_scaled(RewritePlan& dst, const RewritePlan& src, const GaussRational& c) {
  if (c.is_zero()) return;
  for (const auto& t : src.trees) dst.trees.push_back({t.weight * c, t.tree});
  for (const auto& t : src.direct_terms) dst.direct_terms.push_back({t.weight * c, t.tree});
  add_scalar(dst, GaussRational(src.global_phase) * c);
}

RewritePlan fourier_plan(const RewritePlan& p, int mode, int turns) {
  RewritePlan out;
  out.n_modes = p.n_modes;
  out.global_phase = p.global_phase;
  for (const auto& t : p.trees) out.trees.push_back(fourier_image(t, mode, turns));
  for (const auto& t : p.direct_terms) out.direct_terms.push_back(fourier_image(t, mode, turns));
  return out;
}

// [L,R] (x) S = [L (x) S, R] when S acts on other modes.
TreePtr push(const TreePtr& a, const TreePtr& b) {
  if (!a->is_leaf()) return CommutatorTree::make_bracket(push(a->left, b), a->right);
  if (!b->is_leaf()) return CommutatorTree::make_bracket(push(a, b->left), b->right);
  Monomial m = a->leaf;
  for (std::size_t k = 0; k < m.exps.size(); ++k) m.exps[k] = static_cast<std::uint16_t>(m.exps[k] + b->leaf.exps[k]);
  return CommutatorTree::make_leaf(m);
}

// Two-mode leaf Q_a^n Q_b^s through the two-mode identity in Fourier frames.
WeightedTree expand_two_mode_leaf(const Monomial& m) {
  std::vector<int> modes;
  for (int k = 0; k < m.n_modes(); ++k)
    if (m.degree(k) > 0) modes.push_back(k);
  if (modes.size() != 2) throw std::logic_error("expand_two_mode_leaf: not a two-mode leaf");
  const int a = modes[0], b = modes[1];
  WeightedTree t = two_mode_tree(m.degree(a), m.degree(b), a, b, m.n_modes());
  if (m.x(a) > 0) t = fourier_image(t, a, -1);
  if (m.x(b) > 0) t = fourier_image(t, b, -1);
  return t;
}

WeightedTree replace_leaves(const TreePtr& t) {
  if (t->is_leaf()) {
    if (is_realizable_leaf(t->leaf) || t->leaf.active_modes() < 2) return {GaussRational(1), t};
    return expand_two_mode_leaf(t->leaf);
  }
  WeightedTree l = replace_leaves(t->left);
  WeightedTree r = replace_leaves(t->right);
  return bracket(l, r);
}

RewritePlan tensor(const RewritePlan& p, const RewritePlan& q) {
  RewritePlan out;
  out.n_modes = std::max(p.n_modes, q.n_modes);
  std::vector<WeightedTree> a = p.trees, b = q.trees;
  a.insert(a.end(), p.direct_terms.begin(), p.direct_terms.end());
  b.insert(b.end(), q.direct_terms.begin(), q.direct_terms.end());
  for (const auto& x : a)
    for (const auto& y : b) {
      WeightedTree t = replace_leaves(push(x.tree, y.tree));
      add_tree(out, x.weight * y.weight * t.weight, t.tree);
    }
  const GaussRational gp(p.global_phase), gq(q.global_phase);
  for (const auto& y : b) add_tree(out, gp * y.weight, y.tree);
  for (const auto& x : a) add_tree(out, gq * x.weight, x.tree);
  add_scalar(out, gp * gq);
  return out;
}

// Plan of S_ab = (X^a P^b + P^b X^a)/2 on one mode (X^a or P^b when one is 0).
RewritePlan single_mode_plan(int a, int b, int mode, int n_modes) {
  RewritePlan out;
  out.n_modes = n_modes;
  if (a == 0 && b == 0) {
    out.global_phase = 1;
  } else if (b == 0) {
    WeightedTree t = expand_power(mode, n_modes, false, a);
    add_tree(out, t.weight, t.tree);
  } else if (a == 0) {
    WeightedTree t = expand_power(mode, n_modes, true, b);
    add_tree(out, t.weight, t.tree);
  } else if (a < b) {
    // F(S_ba) = (-1)^a S_ab
    append_scaled(out, fourier_plan(single_mode_plan(b, a, mode, n_modes), mode, 1), GaussRational(a % 2 ? -1 : 1));
  } else {
    append_scaled(out, symmetric_pair_trees(a, b, mode, n_modes), GaussRational(Rational(1, 2)));
  }
  return out;
}

QuadPolynomial symmetric_basis(const Monomial& m, int n_modes) {
  QuadPolynomial out = QuadPolynomial::scalar(GaussRational(1), n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const int a = m.x(k), b = m.p(k);
    if (a == 0 && b == 0) continue;
    QuadPolynomial xa = QuadPolynomial::x(k, n_modes, a), pb = QuadPolynomial::p(k, n_modes, b);
    if (a == 0)
      out = out * pb;
    else if (b == 0)
      out = out * xa;
    else
      out = out * ((xa * pb + pb * xa) * GaussRational(Rational(1, 2)));
  }
  return out;
}

int category(const Monomial& m) {
  bool has_x = false, has_p = false;
  for (int k = 0; k < m.n_modes(); ++k) {
    has_x = has_x || m.x(k) > 0;
    has_p = has_p || m.p(k) > 0;
  }
  return has_x && has_p ? 2 : (has_p ? 1 : 0);
}

}  // namespace

WeightedTree fourier_image(const WeightedTree& t, int mode, int quarter_turns) {
  int turns = ((quarter_turns % 4) + 4) % 4;
  int sign = 1;
  TreePtr cur = t.tree;
  for (int r = 0; r < turns; ++r) cur = rotate(cur, mode, sign);
  return {t.weight * GaussRational(sign), cur};
}

WeightedTree power_tree(int m, int mode, int n_modes) {
  if (m < 1) throw std::invalid_argument("power_tree: power must be >= 1");
  if (m <= 3) return {GaussRational(1), leaf(mode, n_modes, false, m)};
  WeightedTree sub = power_tree(m - 1, mode, n_modes);
  WeightedTree inner{GaussRational(1),
                     CommutatorTree::make_bracket(leaf(mode, n_modes, false, 3), leaf(mode, n_modes, true, 2))};
  WeightedTree out = bracket(sub, inner);
  out.weight *= GaussRational(Rational(-2, 3 * (m - 1)));
  return out;
}

RewritePlan symmetric_pair_trees(int m, int n, int mode, int n_modes) {
  if (m < 1 || n < 1) throw std::invalid_argument("symmetric_pair_trees: powers must be >= 1");
  RewritePlan out;
  out.n_modes = n_modes;
  WeightedTree lead = bracket(expand_power(mode, n_modes, false, m + 1), expand_power(mode, n_modes, true, n + 1));
  add_tree(out, lead.weight * GaussRational(Rational(0), Rational(-4, (n + 1) * (m + 1))), lead.tree);
  // [P^{n-k},[X^m,P^k]] = [P^k,[X^m,P^{n-k}]]: keep k <= n - k
  for (int k = 1; 2 * k <= n; ++k) {
    WeightedTree inner = bracket(expand_power(mode, n_modes, false, m), expand_power(mode, n_modes, true, k));
    WeightedTree t = bracket(expand_power(mode, n_modes, true, n - k), inner);
    Rational c(k == n - k ? -1 : -2, n + 1);
    add_tree(out, t.weight * GaussRational(c), t.tree);
  }
  return out;
}

RewritePlan general_term_trees(const GaussRational& c, int m, int n, int mode, int n_modes) {
  if (m < 0 || n < 0) throw std::invalid_argument("general_term_trees: negative power");
  RewritePlan out;
  out.n_modes = n_modes;
  if (m == 0 || n == 0) {
    RewritePlan s = single_mode_plan(m, n, mode, n_modes);
    append_scaled(out, s, GaussRational(c.re * 2));
    return out;
  }
  append_scaled(out, symmetric_pair_trees(m, n, mode, n_modes), GaussRational(c.re));
  if (sgn(c.im) != 0) {
    WeightedTree t = bracket(expand_power(mode, n_modes, false, m), expand_power(mode, n_modes, true, n));
    add_tree(out, t.weight * GaussRational(Rational(0), c.im), t.tree);
  }
  return out;
}

WeightedTree two_mode_tree(int n, int s, int mode_a, int mode_b, int n_modes) {
  if (n < 1 || s < 1) throw std::invalid_argument("two_mode_tree: powers must be >= 1");
  if (mode_a == mode_b) throw std::invalid_argument("two_mode_tree: modes must differ");
  Monomial xx = leaf_monomial(mode_a, n_modes, false, 1);
  xx.exps[2 * mode_b] = 1;
  WeightedTree inner = bracket(expand_power(mode_a, n_modes, true, n + 1), {GaussRational(1), CommutatorTree::make_leaf(xx)});
  WeightedTree out = bracket(expand_power(mode_b, n_modes, true, s + 1), inner);
  out.weight *= GaussRational(Rational(-4, (n + 1) * (s + 1)));
  return out;
}

RewritePlan plan(const QuadPolynomial& h) {
  if (!h.is_hermitian()) throw std::invalid_argument("plan: input is not Hermitian");
  const int n = h.n_modes();
  for (const auto& [m, c] : h.terms())
    if (m.active_modes() > 2)
      throw UnsupportedError("plan: monomial " + monomial_to_string(m) + " couples more than two modes");
  struct Entry {
    Rational c;
    Monomial m;
    int rank;
  };
  std::vector<Entry> entries;
  QuadPolynomial rem = h;
  while (!rem.is_scalar()) {
    const auto& [m, c] = *rem.terms().begin();
    if (!c.is_real()) throw std::invalid_argument("plan: leading coefficient is not real");
    Entry e{c.re, m, static_cast<int>(entries.size())};
    rem -= symmetric_basis(m, n) * GaussRational(e.c);
    entries.push_back(std::move(e));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.m.degree() != b.m.degree()) return a.m.degree() > b.m.degree();
    return category(a.m) < category(b.m);
  });
  RewritePlan out;
  out.n_modes = n;
  add_scalar(out, rem.scalar_part());
  std::map<Monomial, RewritePlan, MonomialOrder> cache;
  for (const auto& e : entries) {
    auto it = cache.find(e.m);
    if (it == cache.end()) {
      std::vector<int> modes;
      for (int k = 0; k < n; ++k)
        if (e.m.degree(k) > 0) modes.push_back(k);
      RewritePlan frag = single_mode_plan(e.m.x(modes[0]), e.m.p(modes[0]), modes[0], n);
      if (modes.size() == 2) frag = tensor(frag, single_mode_plan(e.m.x(modes[1]), e.m.p(modes[1]), modes[1], n));
      it = cache.emplace(e.m, std::move(frag)).first;
    }
    append_scaled(out, it->second, GaussRational(e.c));
  }
  return out;
}

QuadPolynomial RewritePlan::evaluate() const {
  QuadPolynomial out = QuadPolynomial::scalar(GaussRational(global_phase), n_modes);
  for (const auto& t : trees) out += t.tree->evaluate() * t.weight;
  for (const auto& t : direct_terms) out += t.tree->evaluate() * t.weight;
  return out;
}

std::string RewritePlan::to_text() const {
  std::ostringstream os;
  os << "modes\t" << n_modes << '\n';
  for (const auto& t : trees) os << "tree\t" << cvd::to_string(t.weight) << '\t' << t.tree->to_string() << '\n';
  for (const auto& t : direct_terms)
    os << "direct\t" << cvd::to_string(t.weight) << '\t' << t.tree->to_string() << '\n';
  os << "phase\t" << cvd::to_string(global_phase) << '\n';
  return os.str();
}

namespace {

TreePtr parse_tree(const std::string& s, std::size_t& pos, int n_modes) {
  if (pos < s.size() && s[pos] == '[') {
    ++pos;
    TreePtr l = parse_tree(s, pos, n_modes);
    if (pos >= s.size() || s[pos] != ',') throw std::invalid_argument("plan text: expected ','");
    ++pos;
    TreePtr r = parse_tree(s, pos, n_modes);
    if (pos >= s.size() || s[pos] != ']') throw std::invalid_argument("plan text: expected ']'");
    ++pos;
    return CommutatorTree::make_bracket(l, r);
  }
  std::size_t end = s.find_first_of(",]", pos);
  if (end == std::string::npos) end = s.size();
  QuadPolynomial q = parse_polynomial(s.substr(pos, end - pos), n_modes);
  pos = end;
  if (q.terms().size() != 1 || !(q.terms().begin()->second == GaussRational(1)))
    throw std::invalid_argument("plan text: leaf must be a monomial");
  return CommutatorTree::make_leaf(q.terms().begin()->first);
}

GaussRational parse_weight(const std::string& s, int n_modes) {
  QuadPolynomial q = parse_polynomial(s, n_modes);
  if (!q.is_scalar()) throw std::invalid_argument("plan text: weight must be a number");
  return q.scalar_part();
}

}  // namespace

RewritePlan RewritePlan::from_text(const std::string& text) {
  RewritePlan p;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0, tab;
    while ((tab = line.find('\t', start)) != std::string::npos) {
      f.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    f.push_back(line.substr(start));
    if (f[0] == "modes" && f.size() == 2) {
      p.n_modes = std::stoi(f[1]);
    } else if ((f[0] == "tree" || f[0] == "direct") && f.size() == 3) {
      std::size_t pos = 0;
      TreePtr t = parse_tree(f[2], pos, p.n_modes);
      (f[0] == "tree" ? p.trees : p.direct_terms).push_back({parse_weight(f[1], p.n_modes), t});
    } else if (f[0] == "phase" && f.size() == 2) {
      p.global_phase = parse_weight(f[1], p.n_modes).re;
    } else {
      throw std::invalid_argument("plan text: bad line '" + line + "'");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Exact identities

GateSequence exact_x2_sequence(double t, int mode, int n_modes) {
  GateSequence s;
  s.n_modes = n_modes;
  s.x_gate(1, mode, -t * t * t / 3);
  s.x_gate(3, mode, -t);
  s.p_gate(1, mode, -2 * t / 3);
  s.x_gate(3, mode, t);
  s.p_gate(1, mode, 2 * t / 3);
  s.global_phase = -std::pow(t, 4) / 27;
  return s;
}

GateSequence exact_pdc_sequence(double k, double alpha, int mode_a, int mode_b, int n_modes) {
  GateSequence s;
  s.n_modes = n_modes;
  if (k == 0.0 || alpha == 0.0) return s;
  s.p_gate(3, mode_b, -k);
  s.cz(mode_a, mode_b, alpha / 2);
  s.p_gate(3, mode_b, k);
  s.cz(mode_a, mode_b, -alpha);
  s.p_gate(3, mode_b, k);
  s.cz(mode_a, mode_b, alpha / 2);
  s.p_gate(3, mode_b, -k);
  return s;
}

GateSequence conjugation_sequence(double t, int mode, int n_modes) {
  GateSequence s;
  s.n_modes = n_modes;
  s.x_gate(3, mode, -t);
  s.p_gate(2, mode, t);
  s.x_gate(3, mode, t);
  return s;
}

QuadPolynomial conjugation_exponent(const Rational& t) {
  QuadPolynomial inner = QuadPolynomial::p(0, 1) - QuadPolynomial::x(0, 1, 2) * GaussRational(Rational(3, 2) * t);
  return inner * inner * GaussRational(t);
}

GateSequence leaf_sequence(const Monomial& m, double s, int n_modes) {
  if (!is_realizable_leaf(m)) throw std::invalid_argument("leaf_sequence: leaf " + monomial_to_string(m) + " is not realizable");
  GateSequence out;
  out.n_modes = n_modes;
  std::vector<int> modes;
  for (int k = 0; k < m.n_modes(); ++k)
    if (m.degree(k) > 0) modes.push_back(k);
  if (modes.size() == 1) {
    const int k = modes[0];
    if (m.p(k) > 0)
      out.p_gate(m.p(k), k, s);
    else
      out.x_gate(m.x(k), k, s);
    return out;
  }
  const int a = modes[0], b = modes[1];
  GateSequence core;
  core.n_modes = n_modes;
  std::vector<std::pair<int, int>> frames;  // (mode, quarter turns r): F^r core F^-r
  if (m.degree(a) == 1 && m.degree(b) == 1) {
    core.cz(a, b, s / 2);
    if (m.p(a) > 0) frames.push_back({a, 1});
    if (m.p(b) > 0) frames.push_back({b, 1});
  } else {
    const int q = m.degree(a) == 2 ? a : b;  // quadratic mode
    const int l = q == a ? b : a;
    const double alpha = std::cbrt(2 * std::abs(s) / 3);
    core = exact_pdc_sequence(s < 0 ? -alpha : alpha, alpha, q, l, n_modes);
    if (m.p(q) > 0) frames.push_back({q, 1});
    if (m.x(l) > 0) frames.push_back({l, -1});
  }
  for (const auto& [k, r] : frames) out.fourier(k, -r);
  out.append(core);
  for (const auto& [k, r] : frames) out.fourier(k, r);
  return out;
}

}  // namespace cvd
