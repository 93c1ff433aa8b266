#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace octoload {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec16 = Eigen::Matrix<double, 16, 1>;
using Mat16 = Eigen::Matrix<double, 16, 16>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat38 = Eigen::Matrix<double, 3, 8>;
using Mat68 = Eigen::Matrix<double, 6, 8>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent parameter/configuration data; message names the field.
struct ConfigError : Error {
  using Error::Error;
};

/// A linear solve on the mass matrix (or another SPD system) failed.
struct LinearSolveError : Error {
  using Error::Error;
};

/// The Riccati solver could not produce a stabilizing solution within bounds.
struct RiccatiError : Error {
  using Error::Error;
};

/// Attitude extraction hit an infeasible or singular configuration
/// (non-positive collective thrust, |asin| argument > 1, attitude too close
/// to the representation singularity).
struct AllocationDomainError : Error {
  using Error::Error;
};

/// The thrust-allocation KKT system is singular.
struct KktSingularError : Error {
  using Error::Error;
};

/// A covariance factorization failed even after the jitter retry.
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};

/// The innovation covariance in the measurement update is singular.
struct InnovationSingularError : Error {
  using Error::Error;
};

/// Euler-rate matrix inversion too close to the |cos(theta)| = 0 singularity.
struct EulerSingularityError : Error {
  using Error::Error;
};

/// Pose + velocity of the coupled body in generalized coordinates
/// q = (x, y, z, phi, theta, psi): world position of the body origin and
/// ZYX Euler angles, z up.
struct GeneralizedState {
  Vec6 q = Vec6::Zero();
  Vec6 qdot = Vec6::Zero();

  Vec3 xi() const { return q.head<3>(); }
  Vec3 eta() const { return q.tail<3>(); }
  Vec3 xidot() const { return qdot.head<3>(); }
  Vec3 etadot() const { return qdot.tail<3>(); }
};

}  // namespace octoload
