#include "cvd/rational.hpp"

#include <stdexcept>

namespace cvd {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  std::string s = text;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  Rational out;
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (sgn(den) == 0) throw std::invalid_argument("zero denominator in " + text);
    out = num / den;
  } else {
    long exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string::npos) {
      exp10 = std::stol(s.substr(e + 1));
      s = s.substr(0, e);
    }
    auto dot = s.find('.');
    std::string digits = s;
    if (dot != std::string::npos) {
      digits = s.substr(0, dot) + s.substr(dot + 1);
      exp10 -= static_cast<long>(s.size() - dot - 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("malformed number " + text);
    mpz_class n(digits, 10);
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    out = exp10 < 0 ? Rational(n, p) : Rational(n * p);
    out.canonicalize();
  }
  return neg ? Rational(-out) : out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
  Rational den = o.re * o.re + o.im * o.im;
  if (sgn(den) == 0) throw std::domain_error("division by zero");
  Rational r = (re * o.re + im * o.im) / den;
  Rational i = (im * o.re - re * o.im) / den;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string to_string(const GaussRational& z) {
  if (z.is_real()) return to_string(z.re);
  if (sgn(z.re) == 0) return to_string(z.im) + " i";
  std::string im = to_string(abs(z.im));
  return "(" + to_string(z.re) + (sgn(z.im) < 0 ? " - " : " + ") + im + " i)";
}

}  // namespace cvd
