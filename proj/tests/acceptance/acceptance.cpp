// Acceptance criteria AC1-AC7, one PASS/FAIL line each.
// Usage: acceptance [--allow-fail ACn]...
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "cvd/approx.hpp"
#include "cvd/compiler.hpp"
#include "cvd/expression.hpp"
#include "cvd/fock.hpp"
#include "cvd/free_lie.hpp"
#include "cvd/quad_polynomial.hpp"
#include "cvd/rewrite.hpp"

using namespace cvd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

QuadPolynomial X(int k) { return QuadPolynomial::x(0, 1, k); }
QuadPolynomial P(int k) { return QuadPolynomial::p(0, 1, k); }
GaussRational q(long n, long d = 1) { return GaussRational(Rational(n, d)); }

// ---------------------------------------------------------------------------

Outcome ac1() {
  Outcome o;
  for (int m = 2; m <= 8; ++m)
    o.require(q(-2, 3 * (m - 1)) * commutator(X(m - 1), commutator(X(3), P(2))) == X(m),
              "power raising m=" + std::to_string(m));
  for (int m = 1; m <= 5; ++m)
    for (int n = 1; n <= 5; ++n) {
      QuadPolynomial lhs = GaussRational(Rational(0), Rational(-4, (n + 1) * (m + 1))) * commutator(X(m + 1), P(n + 1));
      QuadPolynomial sum(1);
      for (int k = 1; k <= n - 1; ++k) sum += commutator(P(n - k), commutator(X(m), P(k)));
      lhs -= q(1, n + 1) * sum;
      o.require(lhs == X(m) * P(n) + P(n) * X(m), "symmetric pair " + std::to_string(m) + "," + std::to_string(n));
    }
  o.require(q(-2, 9) * commutator(X(3), commutator(X(3), P(2))) == X(4), "Kerr X^4");
  QuadPolynomial d = X(2) * P(2) + P(2) * X(2) + GaussRational(Rational(0), Rational(4, 9)) * commutator(X(3), P(3));
  o.require(d.is_scalar() && d.scalar_part() == q(-1, 6), "Kerr mixed term");
  QuadPolynomial xx = QuadPolynomial::x(0, 2) * QuadPolynomial::x(1, 2);
  for (int n = 1; n <= 3; ++n)
    for (int s = 1; s <= 3; ++s) {
      QuadPolynomial lhs = q(-4, (n + 1) * (s + 1)) *
                           commutator(QuadPolynomial::p(1, 2, s + 1), commutator(QuadPolynomial::p(0, 2, n + 1), xx));
      o.require(lhs == QuadPolynomial::p(0, 2, n) * QuadPolynomial::p(1, 2, s),
                "two-mode " + std::to_string(n) + "," + std::to_string(s));
    }
  if (o.pass) o.detail = "power raising, symmetric pairs, Kerr relations, two-mode identity exact";
  return o;
}

Outcome ac2() {
  Outcome o;
  double worst_printed = 0, worst_refined = 0, worst_drift = 0;
  for (const char* name : {"I", "II", "IV", "V"}) {
    ApproximationScheme printed = printed_table(name);
    VerifyReport v = verify_scheme(printed);
    worst_printed = std::max(worst_printed, v.max_residual());
    o.require(v.max_residual() < 1e-3, std::string("table ") + name + " printed residual " + fmt("%.2e", v.max_residual()));
    NewtonResult info;
    ApproximationScheme refined = refine_scheme(printed, &info);
    double r = verify_scheme(refined).max_residual();
    worst_refined = std::max(worst_refined, r);
    o.require(info.converged && r < 1e-10, std::string("table ") + name + " refined residual " + fmt("%.2e", r));
    for (std::size_t i = 0; i < printed.factors.size(); ++i) {
      double dr = std::abs(printed.factors[i].coefficient - refined.factors[i].coefficient);
      worst_drift = std::max(worst_drift, dr);
      o.require(dr < 1e-4, std::string("table ") + name + " drift " + fmt("%.2e", dr));
    }
  }
  double worst_high = 0;
  for (const auto& [base, pattern] : {std::pair{"comm5", "III"}, std::pair{"nested5", "VI"}}) {
    ApproximationScheme s = second_step_compose(library_scheme(base), printed_pattern(pattern), 9);
    VerifyReport v = verify_scheme(s, 0);
    o.require(s.order == 9, std::string("table ") + pattern + " order");
    o.require(v.target_error < 1e-8, std::string("table ") + pattern + " target");
    for (int order = 6; order <= 9; ++order) {
      double r = v.order_residuals.at(order - 1);
      worst_high = std::max(worst_high, r);
      o.require(r < 1e-8, std::string("table ") + pattern + " order " + std::to_string(order) + " " + fmt("%.2e", r));
    }
  }
  if (o.pass)
    o.detail = "printed " + fmt("%.1e", worst_printed) + ", refined " + fmt("%.1e", worst_refined) + ", drift " +
               fmt("%.1e", worst_drift) + ", orders 6-9 " + fmt("%.1e", worst_high);
  return o;
}

Outcome ac3() {
  Outcome o;
  CompileResult r = compile(parse_polynomial("(X0^2+P0^2)^2"), 0.1, 1e-3);
  o.require(r.report.elementary_count == 46, "elementary " + std::to_string(r.report.elementary_count));
  o.require(r.report.fourier_count == 48, "Fourier " + std::to_string(r.report.fourier_count));
  o.require(r.report.total == 94 && r.sequence.size() == 94, "total " + std::to_string(r.report.total));
  double comm = naive_count(NaiveKind::Commutation, 0.1, 1e-3);
  double nested = naive_count(NaiveKind::Nested, 0.1, 1e-3);
  o.require(std::abs(comm - 4000) < 1e-6, "naive commutation " + fmt("%.6g", comm));
  o.require(nested >= 1e9 && nested <= 1e11, "naive nested " + fmt("%.3g", nested));
  o.require(r.report.naive_count >= 1e7 && r.report.naive_count <= 1e9, "naive Kerr " + fmt("%.3g", r.report.naive_count));
  if (o.pass)
    o.detail = "46 + 48 = 94; naive " + fmt("%.0f", comm) + ", " + fmt("%.2g", nested) + ", Kerr " +
               fmt("%.2g", r.report.naive_count);
  return o;
}

Outcome ac4() {
  Outcome o;
  auto nested = choose_order(0.05 * 2 / 9, 1e-3, SchemeFamily::Nested);
  auto comm = choose_order(0.1 * 4 / 9, 1e-3, SchemeFamily::Commutation);
  o.require(std::abs(nested.dominant_error / 0.55326e-3 - 1) < 1e-2, "nested " + fmt("%.5e", nested.dominant_error));
  o.require(std::abs(comm.dominant_error / 0.41643e-3 - 1) < 1e-2, "commutation " + fmt("%.5e", comm.dominant_error));
  o.require(nested.scheme->merged_gate_count() == 9 && comm.scheme->merged_gate_count() == 10, "gate counts");
  if (o.pass)
    o.detail = "nested " + fmt("%.5e", nested.dominant_error) + " (" + nested.scheme->name + "), commutation " +
               fmt("%.5e", comm.dominant_error) + " (" + comm.scheme->name + ")";
  return o;
}

Outcome ac5() {
  Outcome o;
  struct Case {
    const char* name;
    double t;
    int n;
  };
  const Case cases[] = {{"fourier", 0.2, 64}, {"x2", 0.3, 64}, {"pdc", 0.2, 24}, {"conjugation", 0.2, 64}};
  std::string report;
  for (const auto& c : cases) {
    VerifyRow r = verify_identity(c.name, c.t, c.n, 6, 1e-5);
    report += std::string(report.empty() ? "" : ", ") + c.name + "@" + std::to_string(c.n) + " " + fmt("%.1e", r.distance);
    if (!r.pass) {
      // smallest truncation at which the identity does meet the threshold
      std::string converged = "none up to 128";
      for (int n : {32, 48, 64, 96, 128}) {
        if (n <= c.n || (c.name == std::string("pdc") && n > 64)) continue;
        VerifyRow big = verify_identity(c.name, c.t, n, 6, 1e-5);
        if (big.pass) {
          converged = "N=" + std::to_string(n) + " gives " + fmt("%.1e", big.distance);
          break;
        }
      }
      o.require(false, std::string(c.name) + " " + fmt("%.2e", r.distance) + " at N=" + std::to_string(c.n) + " (" +
                           converged + ")");
    }
  }
  o.detail = o.pass ? report : report + " | " + o.detail;
  return o;
}

// Norm of the deviation of log S(t) from the target over orders 1..max_order.
double residual_norm(const LieElement<double>& g, const Target& target, double t) {
  double sum = 0;
  for (const auto& w : g.basis) {
    double want = w == target.word ? target.value.get_d() : 0.0;
    double dev = (g.coefficient(w) - want) * std::pow(t, static_cast<double>(w.size()));
    sum += dev * dev;
  }
  return std::sqrt(sum);
}

Outcome ac6() {
  Outcome o;
  std::string report;
  auto check = [&](const std::string& label, const ApproximationScheme& s, int expected_power) {
    LieElement<double> g = scheme_log(s, s.order + 3);
    double ratio = residual_norm(g, s.target, 0.1) / residual_norm(g, s.target, 0.05);
    double ideal = std::pow(2.0, expected_power);
    report += (report.empty() ? "" : ", ") + label + " " + fmt("%.1f", ratio) + "/" + fmt("%.0f", ideal);
    o.require(ratio > ideal / 2 && ratio < ideal * 2, label + " ratio " + fmt("%.2f", ratio));
  };
  check("table I", *library_scheme("comm4"), 5);
  check("table IV", printed_table("IV"), 5);
  check("sixth-order symmetric", *library_scheme("nested6"), 7);
  if (o.pass) o.detail = report;
  return o;
}

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

Outcome ac7() {
  Outcome o;
  std::mt19937 rng(20241);
  // Friedrichs: the log of any product of Lie exponentials is a Lie element
  Alphabet ab = Alphabet::plain({"A", "B"});
  Alphabet abc = Alphabet::plain({"A", "B", "C"});
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  std::uniform_int_distribution<int> nf(2, 7);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Alphabet& a = trial % 4 == 0 ? abc : ab;
    int m = 2 + trial % 5;
    std::vector<TruncatedSeries<double>> f;
    for (int k = nf(rng); k > 0; --k) {
      TruncatedSeries<double> s(a, m);
      for (int g = 0; g < a.size(); ++g) s += TruncatedSeries<double>::generator(a, m, g, u(rng));
      f.push_back(s);
    }
    auto lie = project_to_lie(gbch(f), 1.0);
    worst = std::max(worst, lie.residual_norm);
  }
  o.require(worst < 1e-12, "Friedrichs residual " + fmt("%.2e", worst));

  std::vector<QuadPolynomial> corpus;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; a + b <= 6; ++b)
      if (a + b > 0) corpus.push_back(X(a) * P(b));
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      if (a + b > 0 && a + b <= 6) corpus.push_back(QuadPolynomial::x(0, 2, a) * QuadPolynomial::p(1, 2, b));
  int antisym = 0, jacobi = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = i; j < corpus.size(); ++j) {
      const auto& x = corpus[i].with_modes(2);
      const auto& y = corpus[j].with_modes(2);
      if (!(commutator(x, y) == -commutator(y, x))) ++antisym;
    }
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  for (int trial = 0; trial < 300; ++trial) {
    QuadPolynomial a = corpus[pick(rng)].with_modes(2), b = corpus[pick(rng)].with_modes(2),
                   c = corpus[pick(rng)].with_modes(2);
    QuadPolynomial jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    if (!jac.is_zero()) ++jacobi;
  }
  o.require(antisym == 0, std::to_string(antisym) + " antisymmetry failures");
  o.require(jacobi == 0, std::to_string(jacobi) + " Jacobi failures");

  int roundtrip = 0;
  for (int i = 0; i < 50; ++i) {
    QuadPolynomial h = random_hermitian(rng, 1 + i % 2, 6);
    if (!(plan(h).evaluate() == h)) ++roundtrip;
  }
  o.require(roundtrip == 0, std::to_string(roundtrip) + " plan round-trip failures");
  if (o.pass)
    o.detail = "Friedrichs " + fmt("%.1e", worst) + " over 100 products, " + std::to_string(corpus.size()) +
               "-element corpus, 300 Jacobi triples, 50 plan round-trips";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> allowed;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--allow-fail") allowed.insert(argv[++i]);

  struct Criterion {
    const char* id;
    const char* title;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"AC1", "identity suite", 5, ac1},         {"AC2", "table reproduction", 120, ac2},
      {"AC3", "counting benchmarks", 30, ac3},   {"AC4", "scheme error constants", 30, ac4},
      {"AC5", "numeric verification", 120, ac5}, {"AC6", "order scaling", 60, ac6},
      {"AC7", "property suite", 60, ac7},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) o.require(false, "runtime " + fmt("%.1f", secs) + " s over " + fmt("%.0f", c.limit_s) + " s");
    std::printf("%s %s %s (%.1f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !allowed.count(c.id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
