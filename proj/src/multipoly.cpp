#include "cvd/multipoly.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace cvd {

namespace {

constexpr std::uint64_t kCarryBits = 0x1111111111111110ULL;

std::uint64_t add_keys(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  if (((s ^ a ^ b) & kCarryBits) != 0 || s < a)
    throw std::overflow_error("MultiPoly: per-variable degree exceeds 15");
  return s;
}

template <class T>
T ipow(const T& x, int e) {
  T r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

MultiPoly::MultiPoly(const Rational& c) {
  if (sgn(c) != 0) terms_.push_back({0, c});
}

MultiPoly MultiPoly::variable(int index) {
  if (index < 0 || index >= kMaxVars) throw std::out_of_range("MultiPoly: variable index");
  MultiPoly p;
  p.terms_.push_back({std::uint64_t{1} << (4 * index), Rational(1)});
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].key == 0);
}

Rational MultiPoly::constant_term() const {
  return (!terms_.empty() && terms_[0].key == 0) ? terms_[0].coeff : Rational(0);
}

int MultiPoly::total_degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int v = 0; v < kMaxVars; ++v) s += exponent(t.key, v);
    d = std::max(d, s);
  }
  return d;
}

int MultiPoly::degree_in(int var) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, exponent(t.key, var));
  return d;
}

int MultiPoly::max_variable() const {
  int m = -1;
  for (const auto& t : terms_)
    for (int v = kMaxVars - 1; v > m; --v)
      if (exponent(t.key, v) > 0) {
        m = v;
        break;
      }
  return m;
}

void MultiPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().key == t.key)
      out.back().coeff += t.coeff;
    else
      out.push_back(std::move(t));
  }
  std::erase_if(out, [](const Term& t) { return sgn(t.coeff) == 0; });
  terms_ = std::move(out);
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].key < o.terms_[j].key)) {
      out.push_back(std::move(terms_[i++]));
    } else if (i == terms_.size() || o.terms_[j].key < terms_[i].key) {
      out.push_back(o.terms_[j++]);
    } else {
      Rational c = terms_[i].coeff + o.terms_[j].coeff;
      if (sgn(c) != 0) out.push_back({terms_[i].key, std::move(c)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this += -o; }

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= c;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly out;
  if (a.is_zero() || b.is_zero()) return out;
  std::unordered_map<std::uint64_t, Rational> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) {
      auto [it, fresh] = acc.try_emplace(add_keys(s.key, t.key));
      if (fresh)
        it->second = s.coeff * t.coeff;
      else
        it->second += s.coeff * t.coeff;
    }
  out.terms_.reserve(acc.size());
  for (auto& [k, c] : acc)
    if (sgn(c) != 0) out.terms_.push_back({k, std::move(c)});
  std::sort(out.terms_.begin(), out.terms_.end(),
            [](const MultiPoly::Term& x, const MultiPoly::Term& y) { return x.key < y.key; });
  return out;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].key != b.terms_[i].key || a.terms_[i].coeff != b.terms_[i].coeff) return false;
  return true;
}

MultiPoly MultiPoly::derivative(int var) const {
  MultiPoly out;
  const std::uint64_t unit = std::uint64_t{1} << (4 * var);
  for (const auto& t : terms_) {
    int e = exponent(t.key, var);
    if (e == 0) continue;
    out.terms_.push_back({t.key - unit, t.coeff * e});
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::substitute(int var, const Rational& value) const {
  MultiPoly out;
  const std::uint64_t mask = std::uint64_t{0xF} << (4 * var);
  for (const auto& t : terms_) {
    int e = exponent(t.key, var);
    out.terms_.push_back({t.key & ~mask, t.coeff * ipow(value, e)});
  }
  out.normalize();
  return out;
}

double MultiPoly::evaluate(const std::vector<double>& x) const {
  double s = 0;
  for (const auto& t : terms_) {
    double v = t.coeff.get_d();
    for (int k = 0; k < kMaxVars; ++k) {
      int e = exponent(t.key, k);
      if (e) v *= ipow(x.at(k), e);
    }
    s += v;
  }
  return s;
}

std::complex<double> MultiPoly::evaluate(const std::vector<std::complex<double>>& x) const {
  std::complex<double> s = 0;
  for (const auto& t : terms_) {
    std::complex<double> v = t.coeff.get_d();
    for (int k = 0; k < kMaxVars; ++k) {
      int e = exponent(t.key, k);
      if (e) v *= ipow(x.at(k), e);
    }
    s += v;
  }
  return s;
}

Rational MultiPoly::evaluate_exact(const std::vector<Rational>& x) const {
  Rational s = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (int k = 0; k < kMaxVars; ++k) {
      int e = exponent(t.key, k);
      if (e) v *= ipow(x.at(k), e);
    }
    s += v;
  }
  return s;
}

std::string MultiPoly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += sgn(t.coeff) < 0 ? " - " : " + ";
    else if (sgn(t.coeff) < 0) out += "-";
    Rational a = abs(t.coeff);
    std::string mono;
    for (int k = 0; k < kMaxVars; ++k) {
      int e = exponent(t.key, k);
      if (!e) continue;
      if (!mono.empty()) mono += "*";
      mono += k < static_cast<int>(names.size()) ? names[k] : "x" + std::to_string(k);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty())
      out += a.get_str();
    else if (a == 1)
      out += mono;
    else
      out += a.get_str() + "*" + mono;
  }
  return out;
}

CompiledPoly::CompiledPoly(const MultiPoly& p, int n_vars) : n_vars_(n_vars) {
  if (p.max_variable() >= n_vars) throw std::invalid_argument("CompiledPoly: too few variables");
  offsets_.push_back(0);
  for (const auto& t : p.terms()) {
    coeffs_.push_back(t.coeff.get_d());
    for (int k = 0; k < n_vars; ++k) {
      int e = MultiPoly::exponent(t.key, k);
      if (e == 0) continue;
      vars_.push_back(static_cast<std::uint8_t>(k));
      exps_.push_back(static_cast<std::uint8_t>(e));
      max_exp_ = std::max(max_exp_, e);
    }
    offsets_.push_back(static_cast<std::uint32_t>(vars_.size()));
  }
}

namespace {

template <class T>
std::vector<T> power_table(const std::vector<T>& x, int n, int max_exp) {
  std::vector<T> pw(static_cast<std::size_t>(n) * (max_exp + 1));
  for (int k = 0; k < n; ++k) {
    T* row = &pw[static_cast<std::size_t>(k) * (max_exp + 1)];
    row[0] = 1;
    for (int r = 1; r <= max_exp; ++r) row[r] = row[r - 1] * x[k];
  }
  return pw;
}

}  // namespace

template <class T>
T CompiledPoly::value(const std::vector<T>& x) const {
  const int stride = max_exp_ + 1;
  auto pw = power_table(x, n_vars_, max_exp_);
  T s = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    T v = coeffs_[i];
    for (std::uint32_t q = offsets_[i]; q < offsets_[i + 1]; ++q) v *= pw[vars_[q] * stride + exps_[q]];
    s += v;
  }
  return s;
}

template <class T>
void CompiledPoly::value_and_gradient(const std::vector<T>& x, T& value, std::vector<T>& grad) const {
  const int stride = max_exp_ + 1;
  auto pw = power_table(x, n_vars_, max_exp_);
  value = 0;
  grad.assign(n_vars_, T(0));
  T prefix[16];
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::uint32_t b = offsets_[i], e = offsets_[i + 1];
    const int len = static_cast<int>(e - b);
    T acc = 1;
    for (int q = 0; q < len; ++q) {
      prefix[q] = acc;
      acc *= pw[vars_[b + q] * stride + exps_[b + q]];
    }
    value += coeffs_[i] * acc;
    T suffix = coeffs_[i];
    for (int q = len - 1; q >= 0; --q) {
      const int k = vars_[b + q], ek = exps_[b + q];
      grad[k] += suffix * prefix[q] * T(ek) * pw[k * stride + ek - 1];
      suffix *= pw[k * stride + ek];
    }
  }
}

template double CompiledPoly::value(const std::vector<double>&) const;
template std::complex<double> CompiledPoly::value(const std::vector<std::complex<double>>&) const;
template void CompiledPoly::value_and_gradient(const std::vector<double>&, double&, std::vector<double>&) const;
template void CompiledPoly::value_and_gradient(const std::vector<std::complex<double>>&, std::complex<double>&,
                                               std::vector<std::complex<double>>&) const;

}  // namespace cvd
