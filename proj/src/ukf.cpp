#include "octoload/ukf.hpp"

#include <cmath>

namespace octoload {

MatX cholesky_lower(const MatX& P) {
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NotPositiveDefiniteError(
        "cholesky_lower: matrix is not symmetric within 1e-10");
  }
  Eigen::LLT<MatX> llt(P);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  // One jitter retry only: covariances this close to singular are accepted,
  // anything worse is a hard error.
  MatX jittered = P;
  jittered.diagonal().array() += 1e-9;
  Eigen::LLT<MatX> retry(jittered);
  if (retry.info() == Eigen::Success) return retry.matrixL();
  throw NotPositiveDefiniteError(
      "cholesky_lower: factorization failed even with 1e-9 jitter");
}

SigmaPoints sigma_points(const VecX& mean, const MatX& cov) {
  const Eigen::Index n = mean.size();
  const MatX s = cholesky_lower(cov);
  const double scale = std::sqrt(static_cast<double>(n));

  SigmaPoints sp;
  sp.points.resize(n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sp.points.col(i) = mean + scale * s.col(i);
    sp.points.col(n + i) = mean - scale * s.col(i);
  }
  sp.weight = 1.0 / (2.0 * static_cast<double>(n));
  return sp;
}

Moments unscented_transform(const VecX& mean, const MatX& cov,
                            const std::function<VecX(const VecX&)>& f,
                            const MatX& additive_cov) {
  const SigmaPoints sp = sigma_points(mean, cov);
  const Eigen::Index count = sp.points.cols();

  MatX mapped;
  for (Eigen::Index i = 0; i < count; ++i) {
    const VecX out = f(sp.points.col(i));
    if (i == 0) mapped.resize(out.size(), count);
    mapped.col(i) = out;
  }

  Moments m;
  m.mean = mapped.rowwise().sum() * sp.weight;
  const MatX centered = mapped.colwise() - m.mean;
  m.cov = sp.weight * centered * centered.transpose() + additive_cov;
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  return m;
}

Correction unscented_correct(const VecX& mean, const MatX& cov,
                             const std::function<VecX(const VecX&)>& h,
                             const MatX& meas_cov, const VecX& y) {
  const SigmaPoints sp = sigma_points(mean, cov);
  const Eigen::Index count = sp.points.cols();

  MatX mapped;
  for (Eigen::Index i = 0; i < count; ++i) {
    const VecX out = h(sp.points.col(i));
    if (i == 0) mapped.resize(out.size(), count);
    mapped.col(i) = out;
  }

  Correction c;
  c.predicted_meas = mapped.rowwise().sum() * sp.weight;
  const MatX meas_centered = mapped.colwise() - c.predicted_meas;
  const MatX state_centered = sp.points.colwise() - mean;

  c.innovation_cov =
      sp.weight * meas_centered * meas_centered.transpose() + meas_cov;
  c.innovation_cov =
      0.5 * (c.innovation_cov + c.innovation_cov.transpose()).eval();
  const MatX cross = sp.weight * state_centered * meas_centered.transpose();

  Eigen::FullPivLU<MatX> lu(c.innovation_cov);
  if (!lu.isInvertible()) {
    throw InnovationSingularError(
        "unscented_correct: innovation covariance is singular");
  }
  // K = cross * S^-1, computed as (S^-T cross^T)^T with S symmetric.
  const MatX gain = lu.solve(cross.transpose()).transpose();

  c.mean = mean + gain * (y - c.predicted_meas);
  c.cov = cov - gain * c.innovation_cov * gain.transpose();
  c.cov = 0.5 * (c.cov + c.cov.transpose()).eval();
  return c;
}

}  // namespace octoload
