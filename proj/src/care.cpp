#include "octoload/care.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <string>

namespace octoload {

void WeightSet::validate() const {
  const Vec3* blocks[4] = {&Y0, &Y1, &Y2, &Y3};
  const char* names[4] = {"Y0", "Y1", "Y2", "Y3"};
  for (int b = 0; b < 4; ++b) {
    for (int i = 0; i < 3; ++i) {
      if (!((*blocks[b])[i] > 0.0)) {
        throw ConfigError(std::string("weights.") + names[b] + "[" +
                          std::to_string(i) + "] must be positive");
      }
    }
  }
}

CareMatrices build_care_matrices(const WeightSet& w) {
  w.validate();
  CareMatrices m;
  m.A.block<3, 3>(0, 3) = Mat3::Identity();
  m.A.block<3, 3>(3, 6) = Mat3::Identity();
  m.B.block<3, 3>(6, 6) = w.Y3.cwiseInverse().asDiagonal();
  m.Psi.diagonal() << w.Y0, w.Y1, w.Y2;
  return m;
}

MatX solve_lyapunov(const MatX& A, const MatX& W) {
  const Eigen::Index n = A.rows();
  // A' X + X A + W = 0  ->  (I (x) A' + A' (x) I) vec(X) = -vec(W)
  MatX big = MatX::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    big.block(j * n, j * n, n, n) += A.transpose();
    for (Eigen::Index k = 0; k < n; ++k) {
      big.block(j * n, k * n, n, n).diagonal().array() += A(k, j);
    }
  }
  Eigen::FullPivLU<MatX> lu(big);
  if (!lu.isInvertible()) {
    throw LinearSolveError("solve_lyapunov: singular coefficient matrix");
  }
  const VecX vec_w = Eigen::Map<const VecX>(W.data(), n * n);
  const VecX vec_x = lu.solve(-vec_w);
  return Eigen::Map<const MatX>(vec_x.data(), n, n);
}

namespace {

Mat9 care_residual_matrix(const Mat9& A, const Mat9& B, const Mat9& Psi,
                          const Mat9& Q) {
  return Q * A + A.transpose() * Q - Q * B * Q + Psi;
}

}  // namespace

RiccatiSolution solve_care(const Mat9& A, const Mat9& B, const Mat9& Psi) {
  using Mat18 = Eigen::Matrix<double, 18, 18>;
  Mat18 ham;
  ham.topLeftCorner<9, 9>() = A;
  ham.topRightCorner<9, 9>() = -B;
  ham.bottomLeftCorner<9, 9>() = -Psi;
  ham.bottomRightCorner<9, 9>() = -A.transpose();

  const Eigen::EigenSolver<Mat18> es(ham);
  if (es.info() != Eigen::Success) {
    throw RiccatiError("solve_care: Hamiltonian eigendecomposition failed");
  }

  Eigen::Matrix<std::complex<double>, 18, 9> stable;
  int found = 0;
  for (int i = 0; i < 18 && found < 9; ++i) {
    if (es.eigenvalues()[i].real() < 0.0) {
      stable.col(found++) = es.eigenvectors().col(i);
    }
  }
  if (found != 9) {
    throw RiccatiError("solve_care: stable invariant subspace has dimension " +
                       std::to_string(found) + ", expected 9");
  }

  const Eigen::Matrix<std::complex<double>, 9, 9> upper =
      stable.topRows<9>();
  const Eigen::Matrix<std::complex<double>, 9, 9> lower =
      stable.bottomRows<9>();
  Eigen::FullPivLU<Eigen::Matrix<std::complex<double>, 9, 9>> lu(
      upper.transpose());
  if (!lu.isInvertible()) {
    throw RiccatiError("solve_care: stable subspace is not a graph over the "
                       "state space");
  }
  // Q = lower * upper^-1, computed as (upper^-T lower^T)^T.
  Mat9 q = lu.solve(lower.transpose()).transpose().real();
  q = 0.5 * (q + q.transpose()).eval();

  // Two Newton sweeps; each solves the Lyapunov equation of the linearized
  // problem and is quadratically convergent near the solution.
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Mat9 a_cl = A - B * q;
    const Mat9 rhs = Psi + q * B * q;
    MatX x = solve_lyapunov(a_cl, rhs);
    q = 0.5 * (x + x.transpose());
  }

  RiccatiSolution sol;
  sol.Q = q;
  sol.residual = care_residual_matrix(A, B, Psi, q).norm();

  const Eigen::SelfAdjointEigenSolver<Mat9> qe(q);
  if (qe.eigenvalues().minCoeff() <= 0.0) {
    throw RiccatiError("solve_care: solution is not positive definite");
  }
  const Eigen::EigenSolver<Mat9> cl(A - B * q);
  if (cl.eigenvalues().real().maxCoeff() >= 0.0) {
    throw RiccatiError("solve_care: closed loop is not Hurwitz");
  }
  if (!(sol.residual <= 1e-8)) {
    throw RiccatiError("solve_care: residual " + std::to_string(sol.residual) +
                       " exceeds 1e-8");
  }
  return sol;
}

RiccatiSolution solve_tracking_gains(const WeightSet& w) {
  const CareMatrices m = build_care_matrices(w);
  return solve_care(m.A, m.B, m.Psi);
}

}  // namespace octoload
