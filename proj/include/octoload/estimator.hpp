#pragma once

#include "octoload/multibody.hpp"
#include "octoload/types.hpp"
#include "octoload/ukf.hpp"

namespace octoload {

/// Augmented estimator state, 16 entries laid out as
///   [ q (6) | qdot (6) | d (2) | p (2) ]
/// with d the world-frame x/y force disturbances and p = (m_L, r_L).
struct GaussianBelief {
  Vec16 mean = Vec16::Zero();
  Mat16 cov = Mat16::Identity();
};

/// Noise model of the joint filter: additive process covariance on the full
/// augmented state and measurement covariance of the 9-dim sensor vector
/// (position, Euler angles, body angular rates).
struct NoiseConfig {
  Mat16 process_cov = Mat16::Zero();
  Eigen::Matrix<double, 9, 9> meas_cov = Eigen::Matrix<double, 9, 9>::Zero();
};

/// Views into the augmented mean.
GeneralizedState state_of(const Vec16& mu);
Vec2 disturbance_of(const Vec16& mu);
LoadParams load_of(const Vec16& mu);  ///< negative entries clamped to zero

/// One forward-Euler step of the coupled dynamics under thrusts u and the
/// x/y disturbance carried in the state; d and p follow a random walk (held
/// constant here). Negative load parameters are clamped to zero for the
/// dynamics evaluation only; the carried values pass through unchanged.
Vec16 process_model(const Vec16& mu, const Vec8& u, double dt,
                    const VehicleParams& veh);

/// Sensor map: y = (xi, eta, W(eta) etadot).
Vec9 measurement_model(const Vec16& mu);

/// Joint unscented filter over states, disturbances and load parameters.
/// One instance per estimation loop; not safe for concurrent use.
class JointUkf {
 public:
  JointUkf(const GaussianBelief& init, const NoiseConfig& noise,
           const VehicleParams& veh, double dt);

  /// Time update under the previously applied thrusts.
  void predict(const Vec8& u_prev);

  /// Measurement update; call after predict.
  void update(const Vec9& y);

  /// predict + update; returns the posterior belief.
  const GaussianBelief& step(const Vec8& u_prev, const Vec9& y);

  const GaussianBelief& belief() const { return belief_; }

 private:
  GaussianBelief belief_;
  NoiseConfig noise_;
  VehicleParams veh_;
  double dt_;
};

}  // namespace octoload
