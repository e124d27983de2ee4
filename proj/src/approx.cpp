#include "cvd/approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace cvd {

namespace {

using HSeries = TruncatedSeries<HighFloat>;
using PSeries = TruncatedSeries<MultiPoly>;

// Shortest decimal that round-trips, read back exactly: 0.8 -> 4/5.
Rational rational_from_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return parse_rational(std::string(buf, res.ptr));
}

HighFloat high(double v) { return HighFloat(v); }

MultiPoly poly_pow(const MultiPoly& p, int k) {
  MultiPoly r(1);
  for (int i = 0; i < k; ++i) r = r * p;
  return r;
}

std::string row_name(int row, bool primed, const char* stem) {
  return std::string(stem) + std::to_string(row + 1) + (primed ? "'" : "");
}

}  // namespace

const Alphabet& scheme_alphabet() {
  static const Alphabet a = Alphabet::plain({"A", "B"});
  return a;
}

std::string to_string(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::Commutation: return "commutation";
    case SchemeFamily::Nested: return "nested";
    default: return "generic";
  }
}

SchemeFamily family_from_string(const std::string& s) {
  if (s == "commutation" || s == "comm") return SchemeFamily::Commutation;
  if (s == "nested") return SchemeFamily::Nested;
  if (s == "generic") return SchemeFamily::Generic;
  throw std::invalid_argument("unknown scheme family '" + s + "'");
}

Target family_target(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::Commutation: return {Word{0, 1}, Rational(-1)};
    case SchemeFamily::Nested: return {Word{0, 0, 1}, Rational(-1)};
    default: throw std::invalid_argument("generic family has no fixed target");
  }
}

int ApproximationScheme::gate_count() const {
  return static_cast<int>(std::count_if(factors.begin(), factors.end(),
                                        [](const SchemeFactor& f) { return f.coefficient != 0.0; }));
}

int ApproximationScheme::merged_gate_count() const {
  return static_cast<int>(merge_factors(factors).size());
}

std::vector<SchemeFactor> merge_factors(const std::vector<SchemeFactor>& f) {
  std::vector<SchemeFactor> out;
  for (const auto& x : f) {
    if (x.coefficient == 0.0) continue;
    if (!out.empty() && out.back().generator == x.generator) {
      out.back().coefficient += x.coefficient;
      if (out.back().coefficient == 0.0) out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Ansatz Ansatz::alternating(int rows, std::map<std::string, Rational> pins) {
  Ansatz a;
  for (int r = 0; r < rows; ++r) {
    a.slots.push_back({0, row_name(r, false, "c")});
    a.slots.push_back({1, row_name(r, true, "c")});
  }
  a.pins = std::move(pins);
  return a;
}

std::vector<std::string> Ansatz::unknowns() const {
  std::vector<std::string> out;
  for (const auto& s : slots)
    if (!pins.count(s.name)) out.push_back(s.name);
  return out;
}

std::vector<double> ConstraintSystem::evaluate(const std::vector<double>& x) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) out.push_back(values[k].evaluate(x) - targets[k].get_d());
  return out;
}

double ConstraintSystem::max_residual(const std::vector<double>& x) const {
  double m = 0;
  for (double v : evaluate(x)) m = std::max(m, std::abs(v));
  return m;
}

namespace {

PSeries ansatz_product(const Ansatz& a, int m, std::vector<std::string>& unknowns) {
  unknowns = a.unknowns();
  if (unknowns.size() > static_cast<std::size_t>(MultiPoly::kMaxVars))
    throw std::invalid_argument("ansatz has more than 16 unknowns");
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < unknowns.size(); ++i) index[unknowns[i]] = static_cast<int>(i);
  const Alphabet& al = scheme_alphabet();
  std::vector<PSeries> factors;
  for (auto it = a.slots.rbegin(); it != a.slots.rend(); ++it) {
    auto pin = a.pins.find(it->name);
    MultiPoly c = pin != a.pins.end() ? MultiPoly(pin->second) : MultiPoly::variable(index.at(it->name));
    factors.push_back(PSeries::generator(al, m, it->generator, c));
  }
  return exp_product(factors);
}

}  // namespace

ConstraintSystem build_system(const Ansatz& a, const Target& target, int m) {
  const Alphabet& al = scheme_alphabet();
  if (!is_lyndon(target.word) || static_cast<int>(target.word.size()) > m)
    throw std::invalid_argument("target must be a Lyndon bracket of order <= m");
  ConstraintSystem cs;
  PSeries p = ansatz_product(a, m, cs.unknowns);
  auto coords = lie_coordinates_of_log(p);
  for (const auto& w : lyndon_words(al, m)) {
    Rational tgt = w == target.word ? target.value : Rational(0);
    const MultiPoly& f = coords[w];
    if (f.is_zero() && sgn(tgt) == 0) continue;
    cs.values.push_back(f);
    cs.targets.push_back(tgt);
    cs.provenance.push_back(bracket_string(w, al));
  }
  return cs;
}

ConstraintSystem build_raw_system(const Ansatz& a, const Target& target, int m) {
  const Alphabet& al = scheme_alphabet();
  ConstraintSystem cs;
  PSeries p = ansatz_product(a, m, cs.unknowns);
  std::vector<Word> words;
  std::vector<Word> layer{Word()};
  for (int n = 1; n <= m; ++n) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (int g = 0; g < al.size(); ++g) next.push_back(w + static_cast<char>(g));
    words.insert(words.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  std::map<Word, Rational> expected;
  for (const auto& [w, k] : bracket_expansion(target.word)) expected[w] = target.value * k;
  auto coeffs = log_coefficients(p, words);
  for (const auto& w : words) {
    Rational tgt = expected.count(w) ? expected[w] : Rational(0);
    const MultiPoly& f = coeffs[w];
    if (f.is_zero() && sgn(tgt) == 0) continue;
    cs.values.push_back(f);
    cs.targets.push_back(tgt);
    cs.provenance.push_back(al.spell(w));
  }
  return cs;
}

namespace {

// Arithmetic modulo the Mersenne prime 2^61 - 1. Rank over this field equals
// the rational rank unless the prime divides one of a few determinants.
constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
  std::uint64_t r = static_cast<std::uint64_t>(z & kPrime) + static_cast<std::uint64_t>(z >> 61);
  return r >= kPrime ? r - kPrime : r;
}

std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mod_mul(a, a))
    if (e & 1) r = mod_mul(r, a);
  return r;
}

std::uint64_t mod_of(const mpz_class& z) {
  mpz_class r = z % mpz_class(std::to_string(kPrime));
  if (r < 0) r += mpz_class(std::to_string(kPrime));
  return std::stoull(r.get_str());
}

std::uint64_t mod_of(const Rational& q) {
  std::uint64_t d = mod_of(q.get_den());
  if (d == 0) throw std::runtime_error("reduce_dependent: denominator divisible by the modulus");
  return mod_mul(mod_of(q.get_num()), mod_pow(d, kPrime - 2));
}

}  // namespace

ConstraintSystem reduce_dependent(const ConstraintSystem& cs) {
  std::map<std::uint64_t, std::size_t> column;
  std::vector<MultiPoly> rows;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    rows.push_back(cs.residual(k));
    for (const auto& t : rows.back().terms()) column.emplace(t.key, column.size());
  }
  // rows kept in reduced form: pivot column -> dense row with a unit pivot
  std::map<std::size_t, std::vector<std::uint64_t>> basis;
  ConstraintSystem out;
  out.unknowns = cs.unknowns;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    std::vector<std::uint64_t> r(column.size(), 0);
    for (const auto& t : rows[k].terms()) r[column[t.key]] = mod_of(t.coeff);
    for (const auto& [piv, b] : basis) {
      std::uint64_t f = r[piv];
      if (f == 0) continue;
      for (std::size_t j = 0; j < r.size(); ++j)
        if (b[j]) r[j] = (r[j] + kPrime - mod_mul(f, b[j])) % kPrime;
    }
    std::size_t piv = 0;
    while (piv < r.size() && r[piv] == 0) ++piv;
    if (piv == r.size()) continue;
    std::uint64_t inv = mod_pow(r[piv], kPrime - 2);
    for (auto& v : r) v = mod_mul(v, inv);
    for (auto& [q, b] : basis) {
      std::uint64_t f = b[piv];
      if (f == 0) continue;
      for (std::size_t j = 0; j < r.size(); ++j)
        if (r[j]) b[j] = (b[j] + kPrime - mod_mul(f, r[j])) % kPrime;
    }
    basis.emplace(piv, std::move(r));
    out.values.push_back(cs.values[k]);
    out.targets.push_back(cs.targets[k]);
    out.provenance.push_back(cs.provenance[k]);
  }
  return out;
}

std::vector<std::string> SecondStepAnsatz::unknowns() const {
  std::vector<std::string> out;
  for (int r = 0; r < rows; ++r)
    for (bool primed : {false, true}) {
      std::string n = row_name(r, primed, "p");
      if (!pins.count(n)) out.push_back(n);
    }
  return out;
}

ConstraintSystem build_second_step_system(const SecondStepAnsatz& a) {
  Alphabet al;
  al.names.push_back("Z");
  al.weights.push_back(a.time_power);
  for (int k = a.base_order + 1; k <= a.target_order; ++k) {
    al.names.push_back("E" + std::to_string(k));
    al.weights.push_back(k);
  }
  ConstraintSystem cs;
  cs.unknowns = a.unknowns();
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < cs.unknowns.size(); ++i) index[cs.unknowns[i]] = static_cast<int>(i);
  const int m = a.target_order;
  std::vector<PSeries> blocks;  // application order
  for (int r = 0; r < a.rows; ++r)
    for (bool primed : {false, true}) {
      std::string n = row_name(r, primed, "p");
      auto pin = a.pins.find(n);
      MultiPoly p = pin != a.pins.end() ? MultiPoly(pin->second) : MultiPoly::variable(index.at(n));
      PSeries e(al, m);
      for (int g = 0; g < al.size(); ++g) e.add(Word(1, static_cast<char>(g)), poly_pow(p, al.weights[g]));
      if (primed) e *= MultiPoly(-1);
      blocks.push_back(e);
    }
  std::reverse(blocks.begin(), blocks.end());
  auto coords = lie_coordinates_of_log(exp_product(blocks));
  for (const auto& w : lyndon_words(al, m)) {
    Rational tgt = w == Word(1, 0) ? Rational(1) : Rational(0);
    const MultiPoly& f = coords[w];
    if (f.is_zero() && sgn(tgt) == 0) continue;
    cs.values.push_back(f);
    cs.targets.push_back(tgt);
    cs.provenance.push_back(bracket_string(w, al));
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Newton

namespace {

struct CompiledSystem {
  std::vector<CompiledPoly> polys;
  std::vector<double> targets;
  int n = 0;

  explicit CompiledSystem(const ConstraintSystem& cs) : n(static_cast<int>(cs.unknowns.size())) {
    for (std::size_t k = 0; k < cs.size(); ++k) {
      polys.emplace_back(cs.values[k], std::max(n, 1));
      targets.push_back(cs.targets[k].get_d());
    }
  }

  template <class T>
  void eval(const std::vector<T>& x, Eigen::Matrix<T, Eigen::Dynamic, 1>& f,
            Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& j) const {
    const int m = static_cast<int>(polys.size());
    f.resize(m);
    j.resize(m, n);
    std::vector<T> g;
    for (int k = 0; k < m; ++k) {
      T v;
      polys[k].value_and_gradient(x, v, g);
      f(k) = v - T(targets[k]);
      for (int i = 0; i < n; ++i) j(k, i) = g[i];
    }
  }
};

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

NewtonResult newton_solve(const ConstraintSystem& cs, const std::vector<double>& start, const NewtonOptions& opt) {
  NewtonResult res;
  const int n = static_cast<int>(cs.unknowns.size());
  if (static_cast<int>(start.size()) != n) throw std::invalid_argument("start point has wrong dimension");
  CompiledSystem sys(cs);
  std::vector<double> x = start;
  Eigen::VectorXd f;
  Eigen::MatrixXd j;
  double best = INFINITY;
  int stagnant = 0;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    sys.eval(x, f, j);
    res.residual = max_abs(f);
    res.iterations = it;
    if (!std::isfinite(res.residual)) {
      res.diagnostic = "diverged: non-finite residual";
      break;
    }
    if (res.residual < opt.tolerance) {
      res.converged = true;
      break;
    }
    // roundoff floor: stop once the residual no longer improves
    if (res.residual < 1e3 * opt.tolerance) {
      if (res.residual >= best) {
        if (++stagnant >= 3) {
          res.diagnostic = "stalled at roundoff level";
          break;
        }
      } else {
        stagnant = 0;
      }
    }
    best = std::min(best, res.residual);
    if (it == opt.max_iterations) {
      res.diagnostic = "max iterations exceeded";
      break;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(j);
    if (qr.rank() < n) {
      res.diagnostic = "singular Jacobian at iterate " + std::to_string(it);
      break;
    }
    Eigen::VectorXd dx = qr.solve(-f);
    double norm = 0;
    for (int i = 0; i < n; ++i) {
      x[i] += dx(i);
      norm = std::max(norm, std::abs(x[i]));
    }
    if (!std::isfinite(norm) || norm > opt.divergence_bound) {
      res.diagnostic = "diverged: iterate norm exceeds bound";
      break;
    }
  }
  res.x = x;
  return res;
}

// ---------------------------------------------------------------------------
// Homotopy

namespace {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using C = std::complex<double>;

struct PathOutcome {
  PathDiagnostic diag;
  std::vector<C> x;
  bool finished = false;
};

PathOutcome track_path(const CompiledSystem& sys, std::vector<C> x, const HomotopyOptions& opt) {
  PathOutcome out;
  const int n = sys.n;
  CVec f0, f;
  CMat j;
  sys.eval(x, f0, j);
  double s = 0.0, ds = 0.02;
  int steps = 0;
  auto solve = [&](CVec& rhs) {
    Eigen::PartialPivLU<CMat> lu(j);
    rhs = lu.solve(rhs);
    return rhs.allFinite();
  };
  while (s < 1.0 && steps < opt.max_steps) {
    ++steps;
    double step = std::min(ds, 1.0 - s);
    // Euler predictor: J dx/ds = -F(x0)
    sys.eval(x, f, j);
    CVec dx = -f0;
    if (!solve(dx)) {
      ds *= 0.5;
      if (ds < 1e-10) break;
      continue;
    }
    std::vector<C> y = x;
    for (int i = 0; i < n; ++i) y[i] += step * dx(i);
    double s_new = s + step;
    bool ok = false;
    for (int it = 0; it < 6; ++it) {
      sys.eval(y, f, j);
      CVec h = f - (1.0 - s_new) * f0;
      CVec d = -h;
      if (!solve(d)) break;
      double dn = 0, yn = 0;
      for (int i = 0; i < n; ++i) {
        y[i] += d(i);
        dn = std::max(dn, std::abs(d(i)));
        yn = std::max(yn, std::abs(y[i]));
      }
      if (!std::isfinite(yn) || yn > 1e5) break;
      if (dn < 1e-9 * std::max(1.0, yn)) {
        ok = it <= 3;
        break;
      }
    }
    if (ok) {
      x = y;
      s = s_new;
      ds = std::min(ds * 1.6, 0.1);
    } else {
      ds *= 0.5;
      if (ds < 1e-10) break;
    }
  }
  out.diag.steps = steps;
  out.finished = s >= 1.0;
  out.x = x;
  return out;
}

// Seeded per path so results do not depend on scheduling.
std::uint64_t path_seed(unsigned long seed, int index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

HomotopyResult homotopy_solve(const ConstraintSystem& cs, unsigned long seed, const HomotopyOptions& opt) {
  const int n = static_cast<int>(cs.unknowns.size());
  if (static_cast<int>(cs.size()) != n) throw std::invalid_argument("homotopy_solve: system is not square");
  CompiledSystem sys(cs);
  const int n_paths = opt.starts.empty() ? opt.paths : static_cast<int>(opt.starts.size());
  std::vector<PathOutcome> outcomes(n_paths);
  std::vector<std::vector<double>> polished(n_paths);

  auto run = [&](int p) {
    std::vector<C> x0(n);
    if (!opt.starts.empty()) {
      for (int i = 0; i < n; ++i) x0[i] = opt.starts[p].at(i);
    } else {
      std::mt19937_64 rng(path_seed(seed, p));
      std::uniform_real_distribution<double> re(-opt.start_radius, opt.start_radius);
      std::uniform_real_distribution<double> im(-0.5, 0.5);
      for (int i = 0; i < n; ++i) x0[i] = C(re(rng), im(rng));
    }
    PathOutcome o = track_path(sys, x0, opt);
    o.diag.index = p;
    if (!o.finished) {
      o.diag.status = "stalled";
    } else {
      double mi = 0, mx = 0;
      for (const auto& v : o.x) {
        mi = std::max(mi, std::abs(v.imag()));
        mx = std::max(mx, std::abs(v));
      }
      o.diag.max_imag = mi;
      if (!std::isfinite(mx) || mx > 1e4) {
        o.diag.status = "diverged";
      } else if (mi > opt.real_tolerance * std::max(1.0, mx)) {
        o.diag.status = "complex";
      } else {
        std::vector<double> xr(n);
        for (int i = 0; i < n; ++i) xr[i] = o.x[i].real();
        NewtonResult nr = newton_solve(cs, xr);
        if (nr.residual < 1e-10) {
          o.diag.status = "real";
          polished[p] = nr.x;
        } else {
          o.diag.status = "complex";
        }
      }
    }
    outcomes[p] = std::move(o);
  };

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(n_paths, 1));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int p = t; p < n_paths; p += threads) run(p);
    });
  for (auto& th : pool) th.join();

  HomotopyResult res;
  for (int p = 0; p < n_paths; ++p) {
    res.paths.push_back(outcomes[p].diag);
    if (outcomes[p].diag.status != "real") continue;
    bool dup = false;
    for (const auto& s : res.real_solutions) {
      double d = 0;
      for (int i = 0; i < n; ++i) d = std::max(d, std::abs(s[i] - polished[p][i]));
      if (d < 1e-6) dup = true;
    }
    if (!dup) res.real_solutions.push_back(polished[p]);
  }
  return res;
}

std::size_t select_solution(const std::vector<std::vector<double>>& sols, const std::vector<double>& err) {
  if (sols.empty()) throw std::invalid_argument("select_solution: no solutions");
  std::size_t best = 0;
  auto key = [&](std::size_t i) {
    double m = 0;
    for (double v : sols[i]) m = std::max(m, std::abs(v));
    return std::make_pair(m, i < err.size() ? err[i] : 0.0);
  };
  for (std::size_t i = 1; i < sols.size(); ++i)
    if (key(i) < key(best)) best = i;
  return best;
}

// ---------------------------------------------------------------------------
// Scheme logs and verification

namespace {

// Operator series of the scheme. Time rescaling is a graded automorphism, so
// Q(p t) is the base series with word w scaled by p^|w|.
HSeries high_product(const ApproximationScheme& s, int order) {
  const Alphabet& al = scheme_alphabet();
  if (s.composition) {
    const Composition& c = *s.composition;
    std::optional<HSeries> fwd, inv;
    HSeries out = HSeries::constant(al, order, HighFloat(1));
    for (auto it = c.blocks.rbegin(); it != c.blocks.rend(); ++it) {
      if (it->p == 0.0) continue;
      auto& base = it->inverse ? inv : fwd;
      if (!base) base = high_product(it->inverse ? inverse_scheme(*c.base) : *c.base, order);
      HSeries e(al, order);
      HighFloat p = high(it->p);
      for (const auto& [w, v] : base->coeffs()) e.add(w, HighFloat(v * pow(p, static_cast<int>(w.size()))));
      out = out * e;
    }
    return out;
  }
  std::vector<HSeries> f;
  for (auto it = s.factors.rbegin(); it != s.factors.rend(); ++it)
    if (it->coefficient != 0.0) f.push_back(HSeries::generator(al, order, it->generator, high(it->coefficient)));
  if (f.empty()) return HSeries::constant(al, order, HighFloat(1));
  return exp_product(f);
}

HSeries high_log(const ApproximationScheme& s, int order) { return log_series(high_product(s, order)); }

}  // namespace

LieElement<double> scheme_log(const ApproximationScheme& s, int order) {
  auto h = project_to_lie(high_log(s, order), 1e-25);
  LieElement<double> out;
  out.alphabet = h.alphabet;
  out.order = h.order;
  out.basis = h.basis;
  for (const auto& [w, c] : h.coeffs) out.coeffs.emplace(w, static_cast<double>(c));
  out.residual_norm = h.residual_norm;
  out.residual = TruncatedSeries<double>(h.alphabet, h.order);
  return out;
}

double VerifyReport::max_residual() const { return std::max(target_error, max_other); }

VerifyReport verify_scheme(const ApproximationScheme& s, int extra_orders) {
  const Alphabet& al = scheme_alphabet();
  const int top = s.order + extra_orders;
  HSeries log = high_log(s, top);
  auto lie = project_to_lie(log, 1e-25);
  VerifyReport r;
  r.lie_residual = lie.residual_norm;
  r.order_residuals.assign(top, 0.0);
  double norm2 = 0;
  for (const auto& w : lie.basis) {
    HighFloat g = lie.coefficient(w);
    HighFloat expect = w == s.target.word ? ScalarTraits<HighFloat>::from(s.target.value) : HighFloat(0);
    double dev = static_cast<double>(abs(g - expect));
    const int len = static_cast<int>(w.size());
    r.order_residuals[len - 1] = std::max(r.order_residuals[len - 1], dev);
    if (len <= s.order) {
      if (w == s.target.word)
        r.target_error = dev;
      else
        r.max_other = std::max(r.max_other, dev);
    } else if (len == s.order + 1) {
      r.next_order.emplace_back(bracket_string(w, al), static_cast<double>(g));
      norm2 += static_cast<double>(g * g);
    }
  }
  r.error_coefficient = std::sqrt(norm2);
  return r;
}

ApproximationScheme scheme_from_rows(const std::string& name, SchemeFamily family, int order,
                                     const std::vector<std::pair<double, double>>& rows,
                                     const std::string& precision) {
  ApproximationScheme s;
  s.name = name;
  s.family = family;
  s.target = family_target(family);
  s.order = order;
  s.precision = precision;
  for (const auto& [c, cp] : rows) {
    s.factors.push_back({0, c});
    s.factors.push_back({1, cp});
  }
  return s;
}

ApproximationScheme refine_scheme(const ApproximationScheme& s, NewtonResult* info) {
  if (s.composition) throw std::invalid_argument("refine_scheme: composite schemes are refined per block");
  const int rows = static_cast<int>(s.factors.size() / 2);
  std::map<std::string, Rational> pins{{"c1", rational_from_double(s.factors[0].coefficient)},
                                       {"c1'", rational_from_double(s.factors[1].coefficient)}};
  Ansatz a = Ansatz::alternating(rows, pins);
  ConstraintSystem cs = build_system(a, s.target, s.order);
  std::vector<double> start;
  for (std::size_t i = 2; i < s.factors.size(); ++i) start.push_back(s.factors[i].coefficient);
  NewtonResult nr = newton_solve(cs, start);
  if (info) *info = nr;
  if (nr.residual > 1e-10) throw std::runtime_error("refine_scheme: Newton failed: " + nr.diagnostic);
  ApproximationScheme out = s;
  for (std::size_t i = 2; i < s.factors.size(); ++i) out.factors[i].coefficient = nr.x[i - 2];
  out.precision = "full";
  out.error_coefficient = verify_scheme(out).error_coefficient;
  return out;
}

ApproximationScheme inverse_scheme(const ApproximationScheme& s) {
  ApproximationScheme out = s;
  out.name = s.name + "^-1";
  out.factors.assign(s.factors.rbegin(), s.factors.rend());
  for (auto& f : out.factors) f.coefficient = -f.coefficient;
  out.target.value = -s.target.value;
  if (s.composition) {
    Composition c = *s.composition;
    std::reverse(c.blocks.begin(), c.blocks.end());
    for (auto& b : c.blocks) b.inverse = !b.inverse;
    out.composition = c;
  }
  return out;
}

namespace {

void append_block(std::vector<SchemeFactor>& out, const ApproximationScheme& q, double p, bool inverse) {
  if (p == 0.0) return;
  if (!inverse) {
    for (const auto& f : q.factors) out.push_back({f.generator, f.coefficient * p});
  } else {
    for (auto it = q.factors.rbegin(); it != q.factors.rend(); ++it)
      out.push_back({it->generator, -it->coefficient * p});
  }
}

}  // namespace

ApproximationScheme second_step_compose(std::shared_ptr<const ApproximationScheme> q,
                                        const std::vector<std::pair<double, double>>& pattern,
                                        int target_order, NewtonResult* info) {
  if (!q) throw std::invalid_argument("second_step_compose: missing base scheme");
  if (pattern.empty()) throw std::invalid_argument("second_step_compose: empty pattern");
  SecondStepAnsatz a;
  a.base_order = q->order;
  a.time_power = q->target.time_power();
  a.rows = static_cast<int>(pattern.size());
  a.target_order = target_order;
  a.pins["p1"] = rational_from_double(pattern[0].first);
  a.pins["p1'"] = rational_from_double(pattern[0].second);
  for (int r = 1; r < a.rows; ++r) {
    if (pattern[r].first == 0.0) a.pins["p" + std::to_string(r + 1)] = 0;
    if (pattern[r].second == 0.0) a.pins["p" + std::to_string(r + 1) + "'"] = 0;
  }
  std::vector<double> values;
  for (const auto& [p, pp] : pattern) {
    values.push_back(p);
    values.push_back(pp);
  }
  std::vector<double> refined = values;
  if (target_order > q->order) {
    ConstraintSystem cs = build_second_step_system(a);
    std::vector<std::string> all;
    for (int r = 0; r < a.rows; ++r) {
      all.push_back("p" + std::to_string(r + 1));
      all.push_back("p" + std::to_string(r + 1) + "'");
    }
    std::vector<double> start;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (!a.pins.count(all[i])) {
        start.push_back(values[i]);
        where.push_back(i);
      }
    NewtonResult nr = newton_solve(cs, start);
    if (info) *info = nr;
    if (nr.residual > 1e-10)
      throw std::runtime_error("second_step_compose: pattern does not refine: " + nr.diagnostic);
    for (std::size_t k = 0; k < where.size(); ++k) refined[where[k]] = nr.x[k];
  }
  // Z appears with weight p^k - p'^k summed over blocks; the Newton system pins
  // this to 1, the identity pattern drives it to 0.
  const int tp = q->target.time_power();
  double z = 0;
  for (std::size_t i = 0; i < refined.size(); ++i) z += (i % 2 ? -1.0 : 1.0) * std::pow(refined[i], tp);
  ApproximationScheme out;
  out.name = q->name + "-second-step-" + std::to_string(target_order);
  out.family = q->family;
  out.target = q->target;
  if (std::abs(z) < 1e-12)
    out.target.value = 0;
  else if (std::abs(z - 1) > 1e-10)
    throw std::runtime_error("second_step_compose: pattern rescales the target");
  out.order = target_order;
  out.precision = q->precision;
  Composition c{q, {}};
  for (std::size_t i = 0; i < refined.size(); ++i) {
    bool inverse = i % 2 == 1;
    c.blocks.push_back({refined[i], inverse});
    append_block(out.factors, *q, refined[i], inverse);
  }
  out.composition = c;
  VerifyReport rep = verify_scheme(out);
  if (rep.max_residual() > 1e-8)
    throw std::runtime_error("second_step_compose: composed scheme fails verification (residual " +
                             std::to_string(rep.max_residual()) + ")");
  out.error_coefficient = rep.error_coefficient;
  return out;
}

ApproximationScheme suzuki_symmetric(std::shared_ptr<const ApproximationScheme> s4) {
  if (!s4) throw std::invalid_argument("suzuki_symmetric: missing base scheme");
  auto f = merge_factors(s4->factors);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& a = f[i];
    const auto& b = f[f.size() - 1 - i];
    if (a.generator != b.generator || std::abs(a.coefficient - b.coefficient) > 1e-12)
      throw std::invalid_argument("suzuki_symmetric: base scheme is not palindromic");
  }
  const int p = s4->order + 1;  // first odd residual order for a palindromic base
  const double two_root = std::pow(2.0, 1.0 / p);
  const int tp = s4->target.time_power();
  const double alpha = std::pow(2.0 - std::pow(two_root, tp), -1.0 / tp);
  const double beta = -two_root * alpha;
  ApproximationScheme out;
  out.name = s4->name + "-suzuki";
  out.family = s4->family;
  out.target = s4->target;
  out.order = s4->order + 2;
  out.precision = s4->precision;
  Composition c{s4, {{alpha, false}, {beta, false}, {alpha, false}}};
  std::vector<SchemeFactor> flat;
  for (const auto& b : c.blocks) append_block(flat, *s4, b.p, false);
  out.factors = merge_factors(flat);
  out.composition = c;
  out.error_coefficient = verify_scheme(out).error_coefficient;
  return out;
}

ApproximationScheme rescale(const ApproximationScheme& s, int n) {
  if (n < 1) throw std::invalid_argument("rescale: n must be >= 1");
  if (n == 1) return s;
  const int p = s.target.time_power();
  long reps = 1;
  for (int i = 0; i < p; ++i) reps *= n;
  ApproximationScheme out = s;
  out.name = s.name + "/" + std::to_string(n);
  out.factors.clear();
  auto base = std::make_shared<const ApproximationScheme>(s);
  Composition c{base, {}};
  for (long r = 0; r < reps; ++r) {
    append_block(out.factors, s, 1.0 / n, false);
    c.blocks.push_back({1.0 / n, false});
  }
  out.composition = c;
  out.error_coefficient = s.error_coefficient / std::pow(static_cast<double>(n), s.order + 1 - p);
  return out;
}

double naive_count(NaiveKind kind, double strength, double error) {
  if (strength <= 0 || error <= 0) throw std::invalid_argument("naive_count: positive inputs required");
  if (kind == NaiveKind::Commutation) {
    double n = std::max(1.0, std::pow(strength, 1.5) / error);
    return 4.0 * n * n;
  }
  double l = std::max(1.0, strength / error);
  double m = std::max(1.0, std::pow(strength, 4.0 / 3.0) / error);
  return 8.0 * l * l * m * m * m;
}

// ---------------------------------------------------------------------------
// Fixtures

ApproximationScheme printed_table(const std::string& which) {
  if (which == "I")
    return scheme_from_rows("table-I", SchemeFamily::Commutation, 4,
                            {{1.2, -1}, {-0.090992, 1.350762}, {-1.715364, -1.710162}, {-0.610065, 0.275377},
                             {1.216422, 1.084021}},
                            "paper-6-digit");
  if (which == "II")
    return scheme_from_rows("table-II", SchemeFamily::Commutation, 5,
                            {{1.2, -1},
                             {-2.121328, -1.680681},
                             {-0.0199879, 1.602050},
                             {2.025319, 2.743677},
                             {0.061217, -1.170812},
                             {-3.235890, 0.018735},
                             {1.519023, -0.989125},
                             {0.571646, 0.476156}},
                            "paper-6-digit");
  if (which == "IV")
    return scheme_from_rows("table-IV", SchemeFamily::Nested, 4, {{0, 0.5}, {-1, -1}, {1, 1}, {1, -1}, {-1, 0.5}},
                            "paper-6-digit");
  if (which == "V")
    return scheme_from_rows("table-V", SchemeFamily::Nested, 5,
                            {{0, 0.5},
                             {-0.912433, -1.000141},
                             {2.439891, -0.531940},
                             {0.184788, 2.000998},
                             {-0.477395, -1.659152},
                             {-0.761744, 1.465192},
                             {1.181123, -1.312200},
                             {-1.654230, 0.537205}},
                            "paper-6-digit");
  throw std::invalid_argument("no first-step table '" + which + "'");
}

std::vector<std::pair<double, double>> printed_pattern(const std::string& which) {
  if (which == "III")
    return {{0.8, -1}, {1.427601, 1.727306}, {1.816745, 1.700274}, {1.371191, -1.693846}, {-1.698488, 0}};
  if (which == "VI") return {{1, 1.2}, {-0.948048, -0.830428}, {1.049237, -0.887661}, {1.358200, 1.329989}};
  throw std::invalid_argument("no second-step table '" + which + "'");
}

namespace {

ApproximationScheme second_order_commutation() {
  ApproximationScheme s;
  s.name = "comm2";
  s.family = SchemeFamily::Commutation;
  s.target = family_target(s.family);
  s.order = 2;
  s.factors = {{0, -1}, {1, -1}, {0, 1}, {1, 1}};
  s.error_coefficient = verify_scheme(s).error_coefficient;
  return s;
}

ApproximationScheme named(ApproximationScheme s, const std::string& name) {
  s.name = name;
  return s;
}

}  // namespace

std::shared_ptr<const ApproximationScheme> library_scheme(const std::string& name) {
  static std::recursive_mutex mu;
  static std::map<std::string, std::shared_ptr<const ApproximationScheme>> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  ApproximationScheme s;
  if (name == "comm2")
    s = second_order_commutation();
  else if (name == "comm4")
    s = named(refine_scheme(printed_table("I")), name);
  else if (name == "comm5")
    s = named(refine_scheme(printed_table("II")), name);
  else if (name == "comm9")
    s = named(second_step_compose(library_scheme("comm5"), printed_pattern("III"), 9), name);
  else if (name == "nested4")
    s = named(refine_scheme(printed_table("IV")), name);
  else if (name == "nested5")
    s = named(refine_scheme(printed_table("V")), name);
  else if (name == "nested6")
    s = named(suzuki_symmetric(library_scheme("nested4")), name);
  else if (name == "nested9")
    s = named(second_step_compose(library_scheme("nested5"), printed_pattern("VI"), 9), name);
  else
    throw std::invalid_argument("unknown library scheme '" + name + "'");
  auto ptr = std::make_shared<const ApproximationScheme>(std::move(s));
  cache.emplace(name, ptr);
  return ptr;
}

std::vector<std::string> library_names(SchemeFamily f) {
  if (f == SchemeFamily::Commutation) return {"comm2", "comm4", "comm5", "comm9"};
  if (f == SchemeFamily::Nested) return {"nested4", "nested5", "nested6", "nested9"};
  return {};
}

std::string scheme_to_json(const ApproximationScheme& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["family"] = to_string(s.family);
  j["target"] = {{"bracket", bracket_string(s.target.word, scheme_alphabet())},
                 {"word", scheme_alphabet().spell(s.target.word)},
                 {"value", to_string(s.target.value)}};
  j["order"] = s.order;
  j["precision"] = s.precision;
  j["error_coefficient"] = s.error_coefficient;
  j["gate_count"] = s.gate_count();
  j["merged_gate_count"] = s.merged_gate_count();
  nlohmann::json f = nlohmann::json::array();
  for (const auto& x : s.factors) f.push_back({scheme_alphabet().names[x.generator], x.coefficient});
  j["factors"] = f;
  if (s.composition) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& x : s.composition->blocks) b.push_back({{"p", x.p}, {"inverse", x.inverse}});
    j["composition"] = {{"base", nlohmann::json::parse(scheme_to_json(*s.composition->base))}, {"blocks", b}};
  }
  return j.dump(2);
}

namespace {

ApproximationScheme scheme_from_json_value(const nlohmann::json& j) {
  ApproximationScheme s;
  s.name = j.at("name").get<std::string>();
  s.family = family_from_string(j.at("family").get<std::string>());
  const auto& t = j.at("target");
  const Alphabet& al = scheme_alphabet();
  Word w;
  for (char ch : t.at("word").get<std::string>()) {
    auto it = std::find(al.names.begin(), al.names.end(), std::string(1, ch));
    if (it == al.names.end()) throw std::invalid_argument("scheme json: bad target word");
    w.push_back(static_cast<char>(it - al.names.begin()));
  }
  s.target = {w, parse_rational(t.at("value").get<std::string>())};
  s.order = j.at("order").get<int>();
  s.precision = j.value("precision", "full");
  s.error_coefficient = j.value("error_coefficient", 0.0);
  for (const auto& f : j.at("factors")) {
    std::string g = f.at(0).get<std::string>();
    if (g != "A" && g != "B") throw std::invalid_argument("scheme json: generator must be A or B");
    s.factors.push_back({g == "A" ? 0 : 1, f.at(1).get<double>()});
  }
  if (j.contains("composition")) {
    Composition c;
    c.base = std::make_shared<const ApproximationScheme>(scheme_from_json_value(j["composition"].at("base")));
    for (const auto& b : j["composition"].at("blocks"))
      c.blocks.push_back({b.at("p").get<double>(), b.at("inverse").get<bool>()});
    s.composition = c;
  }
  return s;
}

}  // namespace

ApproximationScheme scheme_from_json(const std::string& text) {
  try {
    return scheme_from_json_value(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scheme json: ") + e.what());
  }
}

}  // namespace cvd
