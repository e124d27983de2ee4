#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cvd/fock.hpp"
#include "cvd/rewrite.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace cvd;

TEST(Fock, CanonicalCommutatorAwayFromCorner) {
  const int n = 16;
  auto q = quadratures(n);
  CMatrix c = q.x * q.p - q.p * q.x;
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) {
      std::complex<double> expect = i == j ? std::complex<double>(0, 0.5) : 0.0;
      EXPECT_NEAR(std::abs(c(i, j) - expect), 0.0, 1e-12);
    }
}

TEST(Fock, FourierFixesVacuumUpToPhase) {
  GateSequence s;
  s.fourier(0);
  CMatrix u = sequence_unitary(s, 8);
  EXPECT_NEAR(std::abs(u(0, 0) - std::polar(1.0, std::numbers::pi / 4)), 0.0, 1e-14);
  // F X F^-1 = P on the interior block
  auto q = quadratures(8);
  CMatrix lhs = u * q.x * u.adjoint();
  EXPECT_LT((lhs - q.p).norm(), 1e-12);
}

TEST(Fock, GatesAreUnitary) {
  GateSequence s;
  s.n_modes = 2;
  s.x_gate(3, 0, 0.2);
  s.fourier(1);
  s.x_gate(2, 1, -0.4);
  s.cz(0, 1, 0.3);
  CMatrix u = sequence_unitary(s, 8);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(64, 64)).norm(), 1e-12);
}

TEST(Fock, CzMatchesExponential) {
  GateSequence s;
  s.n_modes = 2;
  s.cz(0, 1, 0.25);
  QuadPolynomial h = QuadPolynomial::x(0, 2) * QuadPolynomial::x(1, 2);
  EXPECT_LT(verify_sequence("cz", s, h, 0.5, 16, 4, 1e-10).distance, 1e-10);
}

TEST(Fock, ColumnDistanceIgnoresGlobalPhase) {
  CMatrix a = CMatrix::Random(6, 3);
  Distance d = column_distance(a, std::polar(1.0, 0.7) * a);
  EXPECT_LT(d.value, 1e-12);
  EXPECT_NEAR(d.phase, -0.7, 1e-12);
}

TEST(Fock, IdentitiesAtConvergedTruncation) {
  EXPECT_LT(verify_identity("fourier", 0.2, 64, 6, 1e-8).distance, 1e-8);
  EXPECT_LT(verify_identity("x2", 0.2, 64, 6, 1e-5).distance, 1e-5);
  EXPECT_LT(verify_identity("x2", 0.3, 128, 6, 1e-6).distance, 1e-6);
  EXPECT_LT(verify_identity("conjugation", 0.2, 64, 6, 1e-5).distance, 1e-5);
  EXPECT_LT(verify_identity("pdc", 0.2, 64, 6, 1e-5).distance, 1e-5);
}

TEST(Fock, DistanceShrinksWithTruncation) {
  for (const char* name : {"x2", "conjugation"}) {
    double prev = verify_identity(name, 0.3, 24, 6, 1).distance;
    for (int n : {48, 96}) {
      double cur = verify_identity(name, 0.3, n, 6, 1).distance;
      EXPECT_LE(cur, prev + 1e-8) << name << " " << n;
      prev = cur;
    }
  }
}

TEST(Fock, PdcIdentityIsExactAtFixedPump) {
  // with X1 replaced by a number the identity is a one-mode statement
  const double k = 0.2, alpha = 0.5, c = 1.5 * k;
  const int n = 64;
  auto q = quadratures(n + 2);
  CMatrix x = q.x.topLeftCorner(n, n), p = q.p.topLeftCorner(n, n);
  CMatrix p2 = (q.p * q.p).topLeftCorner(n, n);
  auto e = [](const CMatrix& h) { return CMatrix((std::complex<double>(0, 1) * h).exp()); };
  for (double x1 : {0.5, 1.5}) {
    double a = alpha * x1;
    CMatrix u = e(a * (x - c * p2)) * e(-2 * a * x) * e(a * (x + c * p2));
    CMatrix v = e(a * a * c * p);
    EXPECT_LT(column_distance(u.leftCols(6), v.leftCols(6)).value, 1e-12);
  }
}

TEST(Fock, WrongSignIsDetected) {
  GateSequence s = exact_x2_sequence(0.3);
  VerifyRow r = verify_sequence("neg", s, QuadPolynomial::x(0, 1, 2), -0.09, 64, 6, 1e-5);
  EXPECT_FALSE(r.pass);
}

TEST(Fock, WarnsWithoutCushion) {
  VerifyRow r = verify_identity("x2", 0.1, 16, 6, 1e-5);
  EXPECT_FALSE(r.warning.empty());
  EXPECT_THROW(verify_identity("nope", 0.1, 16, 4, 1e-5), std::invalid_argument);
}
