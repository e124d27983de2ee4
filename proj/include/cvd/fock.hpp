#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "cvd/gates.hpp"
#include "cvd/quad_polynomial.hpp"

namespace cvd {

using CMatrix = Eigen::MatrixXcd;
using SparseCMatrix = Eigen::SparseMatrix<std::complex<double>>;

/// Truncated single-mode quadratures X = (a + a^dag)/2, P = i(a^dag - a)/2.
struct Quadratures {
  CMatrix x;
  CMatrix p;
};
Quadratures quadratures(int n);

/// Basis index of a multi-mode Fock state: mode 0 is the most significant digit.
std::size_t fock_index(const std::vector<int>& levels, int n);

/// Hermitian part of the truncated polynomial. Each monomial is the N x N
/// corner of the untruncated operator.
SparseCMatrix hamiltonian_sparse(const QuadPolynomial& h, int n);
CMatrix hamiltonian_matrix(const QuadPolynomial& h, int n);

/// e^{i t H} on the truncated space.
CMatrix target_unitary(const QuadPolynomial& h, double t, int n);
/// e^{i t H} applied to the first d levels per mode.
CMatrix target_columns(const QuadPolynomial& h, double t, int n, int d);

CMatrix gate_unitary(const Gate& g, int n_modes, int n);

/// Columns of the sequence unitary on the first d levels per mode (all columns
/// when d == n).
CMatrix sequence_columns(const GateSequence& s, int n, int d);
CMatrix sequence_unitary(const GateSequence& s, int n);

/// Columns of a full operator for the first d levels per mode.
CMatrix low_columns(const CMatrix& u, int n_modes, int n, int d);

struct Distance {
  double value = 0.0;
  double phase = 0.0;  // optimal e^{i phase}
  std::string warning;
};

/// min over theta of || U - e^{i theta} V ||_2 on the given columns; theta
/// comes from the trace of V^dag U.
Distance column_distance(const CMatrix& u_cols, const CMatrix& v_cols);
Distance subspace_distance(const CMatrix& u, const CMatrix& v, int d, int n, int n_modes);

struct VerifyRow {
  std::string name;
  int n = 0;
  int d = 0;
  double distance = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string warning;
};

std::string to_json(const std::vector<VerifyRow>& rows);

/// Distance between a gate sequence and e^{i t h}.
VerifyRow verify_sequence(const std::string& name, const GateSequence& s, const QuadPolynomial& h, double t, int n,
                          int d, double threshold);

/// Named identity checks: "fourier" (F e^{i t X^3} F^-1 = e^{i t P^3}), "x2",
/// "pdc" (k = t, alpha = 0.5) and "conjugation".
VerifyRow verify_identity(const std::string& which, double t, int n, int d, double threshold);
std::vector<std::string> identity_names();

}  // namespace cvd
