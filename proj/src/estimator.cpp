#include "octoload/estimator.hpp"

#include <algorithm>

#include "octoload/kinematics.hpp"

namespace octoload {

GeneralizedState state_of(const Vec16& mu) {
  GeneralizedState s;
  s.q = mu.head<6>();
  s.qdot = mu.segment<6>(6);
  return s;
}

Vec2 disturbance_of(const Vec16& mu) { return mu.segment<2>(12); }

LoadParams load_of(const Vec16& mu) {
  return LoadParams{std::max(mu[14], 0.0), std::max(mu[15], 0.0)};
}

Vec16 process_model(const Vec16& mu, const Vec8& u, double dt,
                    const VehicleParams& veh) {
  const GeneralizedState s = state_of(mu);
  const LoadParams load = load_of(mu);  // clamped for the dynamics only

  GeneralizedForces f;
  f.thrust = u;
  f.external.head<2>() = disturbance_of(mu);

  const Vec6 qddot = forward_dynamics(s, f, veh, load);

  Vec16 next = mu;  // d and p pass through (random walk)
  next.head<6>() += dt * s.qdot;
  next.segment<6>(6) += dt * qddot;
  return next;
}

Vec9 measurement_model(const Vec16& mu) {
  const GeneralizedState s = state_of(mu);
  Vec9 y;
  y.head<3>() = s.xi();
  y.segment<3>(3) = s.eta();
  y.tail<3>() = euler_rate_matrix(s.eta()) * s.etadot();
  return y;
}

JointUkf::JointUkf(const GaussianBelief& init, const NoiseConfig& noise,
                   const VehicleParams& veh, double dt)
    : belief_(init), noise_(noise), veh_(veh), dt_(dt) {}

void JointUkf::predict(const Vec8& u_prev) {
  const auto f = [this, &u_prev](const VecX& x) -> VecX {
    return process_model(x, u_prev, dt_, veh_);
  };
  const Moments m = unscented_transform(belief_.mean, belief_.cov, f,
                                        noise_.process_cov);
  belief_.mean = m.mean;
  belief_.cov = m.cov;
}

void JointUkf::update(const Vec9& y) {
  const auto h = [](const VecX& x) -> VecX { return measurement_model(x); };
  const Correction c =
      unscented_correct(belief_.mean, belief_.cov, h, noise_.meas_cov, y);
  belief_.mean = c.mean;
  belief_.cov = c.cov;
}

const GaussianBelief& JointUkf::step(const Vec8& u_prev, const Vec9& y) {
  predict(u_prev);
  update(y);
  return belief_;
}

}  // namespace octoload
