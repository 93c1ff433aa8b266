#pragma once

// Shared helpers for the unit and acceptance suites: seeded random model
// sampling and independently assembled reference quantities (mass matrix from
// point/body Jacobians, potential energy, Riccati data) that the production
// code must reproduce.

#include <random>

#include <Eigen/Eigenvalues>

#include "octoload/config.hpp"
#include "octoload/kinematics.hpp"
#include "octoload/multibody.hpp"
#include "octoload/types.hpp"

namespace octoload::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  Vec3 vec3(double lo, double hi) {
    return Vec3(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  }

  Vec6 vec6(double lo, double hi) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vec9 vec9(double lo, double hi) {
    Vec9 v;
    for (int i = 0; i < 9; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Random pose with roll/pitch kept away from the cos(theta) = 0
/// representation singularity.
inline GeneralizedState random_state(Rng& rng, double max_tilt = 1.0,
                                     double max_rate = 2.0) {
  GeneralizedState s;
  s.q.head<3>() = rng.vec3(-5.0, 5.0);
  s.q[3] = rng.uniform(-max_tilt, max_tilt);
  s.q[4] = rng.uniform(-max_tilt, max_tilt);
  s.q[5] = rng.uniform(-3.1, 3.1);
  s.qdot = rng.vec6(-max_rate, max_rate);
  return s;
}

inline LoadParams random_load(Rng& rng) {
  LoadParams l;
  l.m_L = rng.uniform(1.0, 120.0);
  l.r_L = rng.uniform(0.05, 1.4);
  return l;
}

/// Mass matrix assembled independently from the two-body kinetic energy:
/// each body contributes m J_v' J_v through its COM Jacobian plus
/// J_w' (R I R') J_w through the shared angular Jacobian.
inline Mat6 mass_matrix_oracle(const Vec3& eta, const VehicleParams& veh,
                               const LoadParams& load) {
  const Mat3 R = rotation_zyx(eta);
  const Mat36 J_ang = angular_jacobian(eta);

  const Mat36 J_O = linear_jacobian(eta, veh.r_O);
  const Mat36 J_L = linear_jacobian(eta, load_offset(veh, load));

  Mat6 M = veh.m_O * J_O.transpose() * J_O +
           J_ang.transpose() * R * veh.I_O * R.transpose() * J_ang;
  M += load.m_L * J_L.transpose() * J_L +
       J_ang.transpose() * R * load.inertia() * R.transpose() * J_ang;
  return M;
}

/// Gravitational potential of both bodies, for finite-difference gradient
/// checks against the analytic gravity vector.
inline double potential_oracle(const Vec6& q, const VehicleParams& veh,
                               const LoadParams& load) {
  const Vec3 xi = q.head<3>();
  const Vec3 eta = q.tail<3>();
  const Mat3 R = rotation_zyx(eta);
  const Vec3 g_vec(0.0, 0.0, veh.g);
  const Vec3 p_O = xi + R * veh.r_O;
  const Vec3 p_L = xi + R * load_offset(veh, load);
  return -(veh.m_O * g_vec.dot(p_O) + load.m_L * g_vec.dot(p_L));
}

/// Independently assembled Riccati data for the stacked error state
/// chi = (integral, error, error rate): block-shift A, effort-weighted input
/// B = blkdiag(0, 0, Y3^-1), state penalty Psi = blkdiag(Y0, Y1, Y2).
struct CareData {
  Mat9 A = Mat9::Zero();
  Mat9 B = Mat9::Zero();
  Mat9 Psi = Mat9::Zero();
};

inline CareData care_data_oracle(const WeightSet& w) {
  CareData d;
  d.A.block<3, 3>(0, 3).setIdentity();
  d.A.block<3, 3>(3, 6).setIdentity();
  d.B.block<3, 3>(6, 6) = w.Y3.cwiseInverse().asDiagonal();
  d.Psi.block<3, 3>(0, 0) = Mat3(w.Y0.asDiagonal());
  d.Psi.block<3, 3>(3, 3) = Mat3(w.Y1.asDiagonal());
  d.Psi.block<3, 3>(6, 6) = Mat3(w.Y2.asDiagonal());
  return d;
}

inline double care_residual(const Mat9& Q, const CareData& d) {
  return (Q * d.A + d.A.transpose() * Q - Q * d.B * Q + d.Psi).norm();
}

inline double max_real_eig(const MatX& A) {
  const Eigen::EigenSolver<MatX> es(A);
  return es.eigenvalues().real().maxCoeff();
}

inline double min_sym_eig(const MatX& S) {
  const Eigen::SelfAdjointEigenSolver<MatX> es(S);
  return es.eigenvalues().minCoeff();
}

inline WeightSet random_weights(Rng& rng) {
  WeightSet w;
  w.Y0 = rng.vec3(0.1, 20.0);
  w.Y1 = rng.vec3(0.1, 20.0);
  w.Y2 = rng.vec3(0.05, 5.0);
  w.Y3 = rng.vec3(0.02, 10.0);
  return w;
}

}  // namespace octoload::testing
