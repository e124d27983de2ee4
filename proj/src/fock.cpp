#include "cvd/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>

#include "cvd/rewrite.hpp"
#include "json.hpp"

namespace cvd {

namespace {

using C = std::complex<double>;
constexpr std::size_t kMaxDim = 4096;

Rational shortest_rational(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return parse_rational(std::string(buf, res.ptr));
}

std::size_t checked_dim(int n_modes, int n) {
  if (n < 4) throw std::invalid_argument("Fock truncation must be at least 4");
  std::size_t dim = 1;
  for (int k = 0; k < n_modes; ++k) {
    dim *= static_cast<std::size_t>(n);
    if (dim > kMaxDim) throw std::invalid_argument("Fock space too large: reduce the truncation");
  }
  return dim;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix embed(const CMatrix& op, int mode, int n_modes, int n) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < n_modes; ++k) out = kron(out, k == mode ? op : CMatrix::Identity(n, n));
  return out;
}

struct Spectrum {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

Eigen::MatrixXd ladder_x(int n) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) x(k, k + 1) = x(k + 1, k) = std::sqrt(static_cast<double>(k + 1)) / 2;
  return x;
}

// Eigenpairs of the N x N corner of X^power, the power taken on N + power
// levels so that the corner matches the untruncated operator.
const Spectrum& x_power_spectrum(int n, int power) {
  thread_local std::map<std::pair<int, int>, Spectrum> cache;
  auto key = std::make_pair(n, power);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd x = ladder_x(n + power);
  Eigen::MatrixXd xp = Eigen::MatrixXd::Identity(n + power, n + power);
  for (int k = 0; k < power; ++k) xp = xp * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xp.topLeftCorner(n, n));
  return cache.emplace(key, Spectrum{es.eigenvectors(), es.eigenvalues()}).first->second;
}

CMatrix single_mode_gate(const Gate& g, int n) {
  if (g.kind == GateKind::Fourier) {
    CMatrix f = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) f(k, k) = std::polar(1.0, std::numbers::pi / 2 * (k + 0.5));
    return f;
  }
  const auto& sp = x_power_spectrum(n, static_cast<int>(g.kind));
  Eigen::VectorXcd phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, g.strength * sp.values(k));
  CMatrix v = sp.vectors.cast<C>();
  return v * phases.asDiagonal() * v.adjoint();
}

// Applies a single-mode operator to `mode` of each column of `psi`.
void apply_single(const CMatrix& op, int mode, int n_modes, int n, CMatrix& psi) {
  std::size_t inner = 1;
  for (int k = mode + 1; k < n_modes; ++k) inner *= n;
  std::size_t outer = static_cast<std::size_t>(psi.rows()) / (inner * n);
  CMatrix block(n, psi.cols());
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in) {
      for (int a = 0; a < n; ++a) block.row(a) = psi.row(static_cast<Eigen::Index>((o * n + a) * inner + in));
      CMatrix r = op * block;
      for (int a = 0; a < n; ++a) psi.row(static_cast<Eigen::Index>((o * n + a) * inner + in)) = r.row(a);
    }
}

void apply_gate(const Gate& g, int n_modes, int n, CMatrix& psi) {
  if (g.kind != GateKind::CZ) {
    apply_single(single_mode_gate(g, n), g.mode, n_modes, n, psi);
    return;
  }
  // diagonal in the product eigenbasis of X_a and X_b
  const auto& sp = x_power_spectrum(n, 1);
  CMatrix v = sp.vectors.cast<C>();
  CMatrix vt = v.adjoint();
  apply_single(vt, g.mode, n_modes, n, psi);
  apply_single(vt, g.mode2, n_modes, n, psi);
  std::vector<int> digits(n_modes);
  for (Eigen::Index r = 0; r < psi.rows(); ++r) {
    std::size_t idx = static_cast<std::size_t>(r);
    for (int k = n_modes - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(idx % n);
      idx /= n;
    }
    psi.row(r) *= std::polar(1.0, 2 * g.strength * sp.values(digits[g.mode]) * sp.values(digits[g.mode2]));
  }
  apply_single(v, g.mode, n_modes, n, psi);
  apply_single(v, g.mode2, n_modes, n, psi);
}

CMatrix low_basis(int n_modes, int n, int d) {
  const std::size_t dim = checked_dim(n_modes, n);
  std::size_t cols = 1;
  for (int k = 0; k < n_modes; ++k) cols *= d;
  CMatrix e = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(cols));
  std::vector<int> lv(n_modes, 0);
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t idx = c;
    for (int k = n_modes - 1; k >= 0; --k) {
      lv[k] = static_cast<int>(idx % d);
      idx /= d;
    }
    e(static_cast<Eigen::Index>(fock_index(lv, n)), static_cast<Eigen::Index>(c)) = 1;
  }
  return e;
}

}  // namespace

Quadratures quadratures(int n) {
  checked_dim(1, n);
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  CMatrix ad = a.adjoint();
  return {(a + ad) / 2.0, C(0, 0.5) * (ad - a)};
}

std::size_t fock_index(const std::vector<int>& levels, int n) {
  std::size_t idx = 0;
  for (int l : levels) idx = idx * n + static_cast<std::size_t>(l);
  return idx;
}

SparseCMatrix hamiltonian_sparse(const QuadPolynomial& h, int n) {
  const int modes = h.n_modes();
  const std::size_t dim = checked_dim(modes, n);
  std::map<std::pair<int, int>, CMatrix> factors;
  auto factor = [&](int a, int b) -> const CMatrix& {
    auto it = factors.find({a, b});
    if (it != factors.end()) return it->second;
    Quadratures q = quadratures(n + a + b);
    CMatrix f = CMatrix::Identity(n + a + b, n + a + b);
    for (int r = 0; r < a; ++r) f = f * q.x;
    for (int r = 0; r < b; ++r) f = f * q.p;
    return factors.emplace(std::make_pair(a, b), CMatrix(f.topLeftCorner(n, n))).first->second;
  };
  std::vector<Eigen::Triplet<C>> trips;
  for (const auto& [m, c] : h.terms()) {
    std::vector<const CMatrix*> fs;
    for (int k = 0; k < modes; ++k) fs.push_back(&factor(m.x(k), m.p(k)));
    const C coeff = c.to_complex();
    // walk the nonzero pattern of the tensor product
    std::vector<std::vector<std::pair<std::pair<int, int>, C>>> nz(modes);
    for (int k = 0; k < modes; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (std::abs((*fs[k])(i, j)) > 1e-300) nz[k].push_back({{i, j}, (*fs[k])(i, j)});
    if (std::any_of(nz.begin(), nz.end(), [](const auto& v) { return v.empty(); })) continue;
    std::vector<std::size_t> pos(modes, 0);
    while (true) {
      std::size_t row = 0, col = 0;
      C v = coeff;
      for (int k = 0; k < modes; ++k) {
        const auto& e = nz[k][pos[k]];
        row = row * n + e.first.first;
        col = col * n + e.first.second;
        v *= e.second;
      }
      trips.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
      int k = modes - 1;
      while (k >= 0 && ++pos[k] == nz[k].size()) pos[k--] = 0;
      if (k < 0) break;
    }
  }
  SparseCMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(trips.begin(), trips.end());
  SparseCMatrix adj = out.adjoint();
  return (out + adj) * C(0.5);
}

CMatrix hamiltonian_matrix(const QuadPolynomial& h, int n) { return CMatrix(hamiltonian_sparse(h, n)); }

CMatrix target_unitary(const QuadPolynomial& h, double t, int n) {
  CMatrix gen = C(0, t) * hamiltonian_matrix(h, n);
  return gen.exp();
}

CMatrix target_columns(const QuadPolynomial& h, double t, int n, int d) {
  SparseCMatrix gen = hamiltonian_sparse(h, n) * C(0, t);
  CMatrix v = low_basis(h.n_modes(), n, d);
  // Taylor steps with the generator scaled below unit norm
  double norm = 0.0;
  for (Eigen::Index c = 0; c < gen.outerSize(); ++c) {
    double col = 0.0;
    for (SparseCMatrix::InnerIterator it(gen, c); it; ++it) col += std::abs(it.value());
    norm = std::max(norm, col);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  const SparseCMatrix g = gen / C(steps);
  for (int s = 0; s < steps; ++s) {
    CMatrix term = v, acc = v;
    for (int k = 1; k < 60; ++k) {
      term = (g * term) / C(k);
      acc += term;
      if (term.norm() < 1e-17 * acc.norm()) break;
    }
    v = acc;
  }
  return v;
}

CMatrix gate_unitary(const Gate& g, int n_modes, int n) {
  const std::size_t dim = checked_dim(n_modes, n);
  if (g.kind != GateKind::CZ) return embed(single_mode_gate(g, n), g.mode, n_modes, n);
  CMatrix psi = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  apply_gate(g, n_modes, n, psi);
  return psi;
}

CMatrix sequence_columns(const GateSequence& s, int n, int d) {
  CMatrix psi = low_basis(s.n_modes, n, d);
  for (const auto& g : s.gates) {
    if (std::max(g.mode, g.mode2) >= s.n_modes) throw std::invalid_argument("gate mode exceeds sequence modes");
    apply_gate(g, s.n_modes, n, psi);
  }
  return psi * std::polar(1.0, s.global_phase);
}

CMatrix sequence_unitary(const GateSequence& s, int n) { return sequence_columns(s, n, n); }

CMatrix low_columns(const CMatrix& u, int n_modes, int n, int d) { return u * low_basis(n_modes, n, d); }

Distance column_distance(const CMatrix& u, const CMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw std::invalid_argument("column_distance: shape mismatch");
  Distance out;
  C overlap = (v.adjoint() * u).trace();
  out.phase = std::abs(overlap) > 0 ? std::arg(overlap) : 0.0;
  CMatrix diff = u - std::polar(1.0, out.phase) * v;
  Eigen::JacobiSVD<CMatrix> svd(diff);
  out.value = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return out;
}

Distance subspace_distance(const CMatrix& u, const CMatrix& v, int d, int n, int n_modes) {
  Distance out = column_distance(low_columns(u, n_modes, n, d), low_columns(v, n_modes, n, d));
  if (4 * d > n) out.warning = "subspace exceeds a quarter of the truncation";
  return out;
}

std::string to_json(const std::vector<VerifyRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"name", r.name},         {"N", r.n},       {"d", r.d}, {"distance", r.distance},
                       {"threshold", r.threshold}, {"pass", r.pass}};
    if (!r.warning.empty()) row["warning"] = r.warning;
    j.push_back(row);
  }
  return j.dump(2);
}

VerifyRow verify_sequence(const std::string& name, const GateSequence& s, const QuadPolynomial& h, double t, int n,
                          int d, double threshold) {
  if (h.n_modes() > s.n_modes) throw std::invalid_argument("verify_sequence: target has more modes than the sequence");
  QuadPolynomial target = h.with_modes(s.n_modes);
  CMatrix u = sequence_columns(s, n, d);
  CMatrix v = target_columns(target, t, n, d);
  Distance dist = column_distance(u, v);
  VerifyRow row{name, n, d, dist.value, threshold, dist.value < threshold, ""};
  if (4 * d > n) row.warning = "subspace exceeds a quarter of the truncation";
  return row;
}

std::vector<std::string> identity_names() { return {"fourier", "x2", "pdc", "conjugation"}; }

VerifyRow verify_identity(const std::string& which, double t, int n, int d, double threshold) {
  if (which == "fourier") {
    GateSequence s;
    s.p_gate(3, 0, t);
    return verify_sequence(which, s, QuadPolynomial::p(0, 1, 3), t, n, d, threshold);
  }
  if (which == "x2") return verify_sequence(which, exact_x2_sequence(t), QuadPolynomial::x(0, 1, 2), t * t, n, d, threshold);
  if (which == "pdc") {
    const double alpha = 0.5;
    QuadPolynomial h = QuadPolynomial::x(0, 2, 2) * QuadPolynomial::p(1, 2);
    return verify_sequence(which, exact_pdc_sequence(t, alpha), h, 1.5 * t * alpha * alpha, n, d, threshold);
  }
  if (which == "conjugation")
    return verify_sequence(which, conjugation_sequence(t), conjugation_exponent(shortest_rational(t)), 1.0, n, d,
                           threshold);
  throw std::invalid_argument("unknown identity '" + which + "'");
}

}  // namespace cvd
