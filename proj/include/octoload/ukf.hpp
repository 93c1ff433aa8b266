#pragma once

#include <functional>

#include "octoload/types.hpp"

namespace octoload {

/// Lower-triangular Cholesky factor of a symmetric PSD matrix. Requires the
/// input symmetric within 1e-10. On a failed factorization retries once with
/// +1e-9 I jitter, then throws NotPositiveDefiniteError.
MatX cholesky_lower(const MatX& P);

/// Symmetric sigma-point set: 2n points mu +- sqrt(n) * column_i(S) with
/// S = cholesky_lower(P), all weighted 1/(2n).
struct SigmaPoints {
  MatX points;  ///< n x 2n, column j is one sigma point
  double weight = 0.0;
};
SigmaPoints sigma_points(const VecX& mean, const MatX& cov);

/// First two moments of a pushed-forward sigma set.
struct Moments {
  VecX mean;
  MatX cov;
};

/// Pushes the sigma set of (mean, cov) through f and recovers mean/covariance,
/// adding additive_cov; the result covariance is symmetrized.
Moments unscented_transform(const VecX& mean, const MatX& cov,
                            const std::function<VecX(const VecX&)>& f,
                            const MatX& additive_cov);

/// Measurement correction: draws fresh sigma points from the predicted
/// (mean, cov), maps them through h, and applies the Kalman update with
/// measurement covariance meas_cov. Throws InnovationSingularError when the
/// innovation covariance is singular.
struct Correction {
  VecX mean;
  MatX cov;
  VecX predicted_meas;
  MatX innovation_cov;
};
Correction unscented_correct(const VecX& mean, const MatX& cov,
                             const std::function<VecX(const VecX&)>& h,
                             const MatX& meas_cov, const VecX& y);

}  // namespace octoload
