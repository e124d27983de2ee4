#include "cvd/quad_polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace cvd {

int Monomial::degree() const {
  int d = 0;
  for (auto e : exps) d += e;
  return d;
}

int Monomial::active_modes() const {
  int n = 0;
  for (int k = 0; k < n_modes(); ++k) n += degree(k) > 0 ? 1 : 0;
  return n;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  int da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  return std::lexicographical_compare(b.exps.begin(), b.exps.end(), a.exps.begin(), a.exps.end());
}

namespace {

struct ModeTerm {
  int x;
  int p;
  GaussRational c;
};

Rational binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

// (X^a P^b)(X^c P^d) = sum_k k! C(b,k) C(c,k) (-i/2)^k X^{a+c-k} P^{b+d-k}
std::vector<ModeTerm> mode_product(int a, int b, int c, int d) {
  std::vector<ModeTerm> out;
  GaussRational step(Rational(0), Rational(-1, 2));
  GaussRational pw(1);
  Rational fact(1);
  for (int k = 0; k <= std::min(b, c); ++k) {
    if (k > 0) {
      pw *= step;
      fact *= k;
    }
    out.push_back({a + c - k, b + d - k, pw * GaussRational(fact * binomial(b, k) * binomial(c, k))});
  }
  return out;
}

void multiply_monomials(const Monomial& u, const Monomial& v, const GaussRational& coeff,
                        QuadPolynomial& acc) {
  const int n = u.n_modes();
  std::vector<std::vector<ModeTerm>> per_mode(n);
  for (int k = 0; k < n; ++k) per_mode[k] = mode_product(u.x(k), u.p(k), v.x(k), v.p(k));
  std::vector<std::size_t> idx(n, 0);
  Monomial m;
  m.exps.resize(2 * n);
  while (true) {
    GaussRational c = coeff;
    for (int k = 0; k < n; ++k) {
      const auto& t = per_mode[k][idx[k]];
      m.exps[2 * k] = static_cast<std::uint16_t>(t.x);
      m.exps[2 * k + 1] = static_cast<std::uint16_t>(t.p);
      c *= t.c;
    }
    acc.add_term(m, c);
    int k = 0;
    while (k < n && ++idx[k] == per_mode[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
}

}  // namespace

QuadPolynomial::QuadPolynomial(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be positive");
}

Monomial QuadPolynomial::identity_monomial() const {
  Monomial m;
  m.exps.assign(2 * n_modes_, 0);
  return m;
}

QuadPolynomial QuadPolynomial::scalar(const GaussRational& c, int n_modes) {
  QuadPolynomial q(n_modes);
  q.add_term(q.identity_monomial(), c);
  return q;
}

QuadPolynomial QuadPolynomial::x(int mode, int n_modes, int power) {
  QuadPolynomial q(n_modes);
  Monomial m = q.identity_monomial();
  m.exps.at(2 * mode) = static_cast<std::uint16_t>(power);
  q.add_term(m, GaussRational(1));
  return q;
}

QuadPolynomial QuadPolynomial::p(int mode, int n_modes, int power) {
  QuadPolynomial q(n_modes);
  Monomial m = q.identity_monomial();
  m.exps.at(2 * mode + 1) = static_cast<std::uint16_t>(power);
  q.add_term(m, GaussRational(1));
  return q;
}

QuadPolynomial QuadPolynomial::term(const Monomial& m, const GaussRational& c) {
  QuadPolynomial q(std::max(1, m.n_modes()));
  q.add_term(m, c);
  return q;
}

QuadPolynomial QuadPolynomial::canonicalize(const std::vector<Letter>& word, int n_modes) {
  QuadPolynomial acc = scalar(GaussRational(1), n_modes);
  for (const auto& l : word) {
    if (l.mode < 0 || l.mode >= n_modes) throw std::out_of_range("letter mode out of range");
    acc = acc * (l.is_p ? p(l.mode, n_modes) : x(l.mode, n_modes));
  }
  return acc;
}

void QuadPolynomial::add_term(const Monomial& m, const GaussRational& c) {
  if (c.is_zero()) return;
  if (m.n_modes() != n_modes_) {
    if (m.n_modes() > n_modes_) {
      *this = with_modes(m.n_modes());
    } else {
      Monomial wide = m;
      wide.exps.resize(2 * n_modes_, 0);
      add_term(wide, c);
      return;
    }
  }
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

GaussRational QuadPolynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? GaussRational() : it->second;
}

GaussRational QuadPolynomial::scalar_part() const { return coefficient(identity_monomial()); }

QuadPolynomial QuadPolynomial::without_scalar() const {
  QuadPolynomial q = *this;
  q.terms_.erase(identity_monomial());
  return q;
}

bool QuadPolynomial::is_scalar() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_identity());
}

int QuadPolynomial::degree() const {
  return terms_.empty() ? 0 : terms_.begin()->first.degree();
}

QuadPolynomial QuadPolynomial::with_modes(int n_modes) const {
  if (n_modes < n_modes_) throw std::invalid_argument("cannot shrink mode count");
  QuadPolynomial q(n_modes);
  for (const auto& [m, c] : terms_) {
    Monomial w = m;
    w.exps.resize(2 * n_modes, 0);
    q.terms_.emplace(std::move(w), c);
  }
  return q;
}

QuadPolynomial QuadPolynomial::adjoint() const {
  QuadPolynomial out(n_modes_);
  for (const auto& [m, c] : terms_) {
    // (X^a P^b)^dag = P^b X^a per mode; modes commute.
    QuadPolynomial t = scalar(c.conj(), n_modes_);
    for (int k = 0; k < n_modes_; ++k) {
      if (m.p(k) == 0 || m.x(k) == 0) {
        Monomial single = identity_monomial();
        single.exps[2 * k] = m.exps[2 * k];
        single.exps[2 * k + 1] = m.exps[2 * k + 1];
        t = t * term(single, GaussRational(1));
      } else {
        t = t * p(k, n_modes_, m.p(k)) * x(k, n_modes_, m.x(k));
      }
    }
    out += t;
  }
  return out;
}

QuadPolynomial& QuadPolynomial::operator+=(const QuadPolynomial& o) {
  if (o.n_modes_ > n_modes_) *this = with_modes(o.n_modes_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

QuadPolynomial& QuadPolynomial::operator-=(const QuadPolynomial& o) {
  if (o.n_modes_ > n_modes_) *this = with_modes(o.n_modes_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

QuadPolynomial& QuadPolynomial::operator*=(const GaussRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

QuadPolynomial operator*(const QuadPolynomial& a, const QuadPolynomial& b) {
  const int n = std::max(a.n_modes(), b.n_modes());
  const QuadPolynomial& aw = a.n_modes() == n ? a : a.with_modes(n);
  const QuadPolynomial bw = b.n_modes() == n ? b : b.with_modes(n);
  QuadPolynomial out(n);
  for (const auto& [u, cu] : aw.terms())
    for (const auto& [v, cv] : bw.terms()) multiply_monomials(u, v, cu * cv, out);
  return out;
}

bool operator==(const QuadPolynomial& a, const QuadPolynomial& b) {
  if (a.n_modes_ != b.n_modes_) {
    int n = std::max(a.n_modes_, b.n_modes_);
    return a.with_modes(n) == b.with_modes(n);
  }
  return a.terms_ == b.terms_;
}

QuadPolynomial multiply(const QuadPolynomial& a, const QuadPolynomial& b) { return a * b; }

QuadPolynomial commutator(const QuadPolynomial& a, const QuadPolynomial& b) {
  return a * b - b * a;
}

QuadPolynomial power(const QuadPolynomial& a, int k) {
  if (k < 0) throw std::invalid_argument("negative power");
  QuadPolynomial out = QuadPolynomial::scalar(GaussRational(1), a.n_modes());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

QuadPolynomial fourier_conjugate(const QuadPolynomial& a, int mode, int quarter_turns) {
  if (mode < 0 || mode >= a.n_modes()) throw std::out_of_range("mode out of range");
  int turns = ((quarter_turns % 4) + 4) % 4;
  QuadPolynomial cur = a;
  const int n = a.n_modes();
  for (int r = 0; r < turns; ++r) {
    QuadPolynomial next(n);
    for (const auto& [m, c] : cur.terms()) {
      // X^a P^b -> P^a (-X)^b
      Monomial rest = m;
      rest.exps[2 * mode] = 0;
      rest.exps[2 * mode + 1] = 0;
      GaussRational sign(m.p(mode) % 2 ? -1 : 1);
      next += QuadPolynomial::term(rest, c * sign) * QuadPolynomial::p(mode, n, m.x(mode)) *
              QuadPolynomial::x(mode, n, m.p(mode));
    }
    cur = std::move(next);
  }
  return cur;
}

std::string monomial_to_string(const Monomial& m) {
  std::string out;
  for (int k = 0; k < m.n_modes(); ++k) {
    for (int q = 0; q < 2; ++q) {
      int e = m.exps[2 * k + q];
      if (e == 0) continue;
      if (!out.empty()) out += ' ';
      out += (q == 0 ? "X" : "P") + std::to_string(k);
      if (e > 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

std::string QuadPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    GaussRational shown = c;
    bool negative = (c.is_real() && sgn(c.re) < 0) || (sgn(c.re) == 0 && sgn(c.im) < 0);
    if (!first) {
      out += negative ? " - " : " + ";
      if (negative) shown = -c;
    }
    first = false;
    out += cvd::to_string(shown);
    if (!m.is_identity()) out += " * " + monomial_to_string(m);
  }
  return out;
}

}  // namespace cvd
