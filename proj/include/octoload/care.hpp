#pragma once

#include "octoload/types.hpp"

namespace octoload {

/// Diagonal weights of one tracking-gain synthesis problem (one per control
/// loop). Y0 penalizes the error integral, Y1 the error, Y2 the error rate,
/// and Y3 the virtual control effort; all entries must be positive.
struct WeightSet {
  Vec3 Y0 = Vec3::Ones();
  Vec3 Y1 = Vec3::Ones();
  Vec3 Y2 = Vec3::Ones();
  Vec3 Y3 = Vec3::Ones();

  void validate() const;  ///< throws ConfigError on a non-positive entry
};

/// The 9x9 matrices of the algebraic Riccati equation
///   Q A + A' Q - Q B Q + Psi = 0
/// for the stacked error state chi = (integral, error, error rate):
/// A is the block shift (identity on the two super-diagonal blocks),
/// B = blkdiag(0, 0, Y3^-1), Psi = blkdiag(Y0, Y1, Y2).
struct CareMatrices {
  Mat9 A = Mat9::Zero();
  Mat9 B = Mat9::Zero();
  Mat9 Psi = Mat9::Zero();
};

CareMatrices build_care_matrices(const WeightSet& w);

/// Stabilizing solution of the Riccati equation plus its achieved residual
/// norm ||Q A + A' Q - Q B Q + Psi||_F.
struct RiccatiSolution {
  Mat9 Q = Mat9::Zero();
  double residual = 0.0;
};

/// Solves Q A + A' Q - Q B Q + Psi = 0 for the symmetric positive definite
/// stabilizing Q via the Hamiltonian stable-subspace method, then polishes
/// with two Newton sweeps (each a Lyapunov solve). Throws RiccatiError if no
/// stabilizing solution is found, Q fails symmetry/definiteness checks, the
/// closed loop A - B Q is not Hurwitz, or the residual exceeds 1e-8.
RiccatiSolution solve_care(const Mat9& A, const Mat9& B, const Mat9& Psi);

/// Convenience: build_care_matrices + solve_care.
RiccatiSolution solve_tracking_gains(const WeightSet& w);

/// Solves A' X + X A + W = 0 for X (used by the Newton polish; exposed for
/// testing). Dense Kronecker assembly; requires A Hurwitz for a meaningful
/// result. Throws LinearSolveError if the assembled system is singular.
MatX solve_lyapunov(const MatX& A, const MatX& W);

}  // namespace octoload
