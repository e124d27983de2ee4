#include "cvd/free_lie.hpp"

#include <mutex>
#include <sstream>
#include <iomanip>

namespace cvd {

Alphabet Alphabet::plain(const std::vector<std::string>& names) {
  return Alphabet{names, std::vector<int>(names.size(), 1)};
}

int Alphabet::weight(const Word& w) const {
  int s = 0;
  for (char c : w) s += weights.at(static_cast<unsigned char>(c));
  return s;
}

std::string Alphabet::spell(const Word& w) const {
  std::string out;
  for (char c : w) out += names.at(static_cast<unsigned char>(c));
  return out;
}

bool is_lyndon(const Word& w) {
  if (w.empty()) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!(w < w.substr(i) + w.substr(0, i))) return false;
  return true;
}

std::vector<Word> lyndon_words(const Alphabet& a, int m) {
  std::vector<Word> out;
  std::vector<Word> frontier{Word()};
  while (!frontier.empty()) {
    std::vector<Word> next;
    for (const auto& w : frontier)
      for (int g = 0; g < a.size(); ++g) {
        Word v = w + static_cast<char>(g);
        if (a.weight(v) > m) continue;
        next.push_back(v);
        if (is_lyndon(v)) out.push_back(v);
      }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), [&](const Word& x, const Word& y) {
    int wx = a.weight(x), wy = a.weight(y);
    return wx != wy ? wx < wy : x < y;
  });
  return out;
}

std::pair<Word, Word> standard_factorization(const Word& w) {
  if (w.size() < 2) throw std::invalid_argument("standard_factorization: word too short");
  for (std::size_t i = 1; i < w.size(); ++i) {
    Word v = w.substr(i);
    if (is_lyndon(v)) return {w.substr(0, i), v};
  }
  throw std::logic_error("no Lyndon suffix");
}

const std::map<Word, long>& bracket_expansion(const Word& w) {
  static std::mutex mu;
  static std::map<Word, std::map<Word, long>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
  }
  std::map<Word, long> ex;
  if (w.size() == 1) {
    ex[w] = 1;
  } else {
    auto [u, v] = standard_factorization(w);
    const auto eu = bracket_expansion(u);
    const auto ev = bracket_expansion(v);
    for (const auto& [a, ca] : eu)
      for (const auto& [b, cb] : ev) {
        ex[a + b] += ca * cb;
        ex[b + a] -= ca * cb;
      }
    std::erase_if(ex, [](const auto& kv) { return kv.second == 0; });
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(w, std::move(ex)).first->second;
}

std::string bracket_string(const Word& w, const Alphabet& a) {
  if (w.size() == 1) return a.names.at(static_cast<unsigned char>(w[0]));
  auto [u, v] = standard_factorization(w);
  return "[" + bracket_string(u, a) + "," + bracket_string(v, a) + "]";
}

QuadPolynomial evaluate_bracket(const Word& w, const std::vector<QuadPolynomial>& images) {
  if (w.size() == 1) return images.at(static_cast<unsigned char>(w[0]));
  auto [u, v] = standard_factorization(w);
  return commutator(evaluate_bracket(u, images), evaluate_bracket(v, images));
}

QuadPolynomial evaluate_lie(const LieElement<Rational>& e, const std::vector<QuadPolynomial>& images) {
  QuadPolynomial out(images.empty() ? 1 : images.front().n_modes());
  for (const auto& [w, c] : e.coeffs) out += GaussRational(c) * evaluate_bracket(w, images);
  return out;
}

QuadPolynomial evaluate_series(const TruncatedSeries<Rational>& s, const std::vector<QuadPolynomial>& images) {
  const int n = images.empty() ? 1 : images.front().n_modes();
  QuadPolynomial out(n);
  for (const auto& [w, c] : s.coeffs()) {
    QuadPolynomial t = QuadPolynomial::scalar(GaussRational(c), n);
    for (char g : w) t = t * images.at(static_cast<unsigned char>(g));
    out += t;
  }
  return out;
}

std::string dump_table(const LieElement<double>& e) {
  std::ostringstream os;
  os << std::setprecision(12);
  for (const auto& w : e.basis) {
    auto it = e.coeffs.find(w);
    os << bracket_string(w, e.alphabet) << '\t' << (it == e.coeffs.end() ? 0.0 : it->second) << '\n';
  }
  os << "residual\t" << e.residual_norm << '\n';
  return os.str();
}

}  // namespace cvd
