#pragma once

#include <array>

#include "octoload/types.hpp"

namespace octoload {

/// Fixed physical parameters of the octocopter body and its rotor layout.
/// Units are SI throughout; g is the signed gravity acceleration along the
/// world z axis (negative for the usual z-up convention).
struct VehicleParams {
  double m_O = 0.0;              ///< body mass [kg]
  Mat3 I_O = Mat3::Zero();       ///< body inertia about the body origin [kg m^2]
  Vec3 r_O = Vec3::Zero();       ///< body COM offset from the origin [m]
  std::array<Vec3, 8> prop_pos{};    ///< rotor positions in body frame [m]
  std::array<double, 8> spin_dir{};  ///< rotor spin directions, +1 / -1
  double b = 0.0;      ///< thrust coefficient, f = b * omega^2 [N s^2]
  double k_tau = 0.0;  ///< drag-torque coefficient [N m s^2]
  double k_b = 0.0;    ///< drag-to-thrust ratio, must equal k_tau / b
  double g = -9.81;    ///< signed gravity acceleration [m/s^2]
  double delta_L = 0.0;   ///< attachment strut length below the origin [m]
  double varsigma = -1.0; ///< attachment side along body z: -1 below, +1 above

  /// Throws ConfigError naming the offending field (non-positive mass,
  /// inconsistent k_b, |spin_dir| != 1, ...).
  void validate() const;
};

/// Parameters of the transported spherical load; these two scalars are what
/// the joint estimator identifies online.
struct LoadParams {
  double m_L = 0.0;  ///< load mass [kg]
  double r_L = 0.0;  ///< load radius [m]

  /// Solid-sphere inertia about the load's own COM: (m_L/6) r_L^2 I3.
  Mat3 inertia() const;
};

/// Body-frame position of the load COM: (0, 0, varsigma * (delta_L + r_L)).
Vec3 load_offset(const VehicleParams& veh, const LoadParams& load);

/// Inputs to the coupled dynamics: per-rotor thrusts along body z and an
/// exogenous generalized force (world-frame force on the first three
/// coordinates, attitude generalized force on the last three).
struct GeneralizedForces {
  Vec8 thrust = Vec8::Zero();
  Vec6 external = Vec6::Zero();
};

/// Thrust of one rotor spinning at omega [rad/s]: b * omega^2.
double propeller_thrust(double omega, const VehicleParams& veh);

/// Reaction drag torque of rotor p about body z: spin_dir[p] * k_tau * omega^2.
double propeller_torque(double omega, int p, const VehicleParams& veh);

/// Symmetric positive definite 6x6 generalized mass matrix of the coupled
/// body+load system.
Mat6 mass_matrix(const GeneralizedState& s, const VehicleParams& veh,
                 const LoadParams& load);

/// Coriolis/centrifugal matrix built from Christoffel symbols of the mass
/// matrix; the attitude partials are evaluated by central finite differences
/// with step 1e-6 (the mass matrix is position-independent).
/// Satisfies the qdot' (Mdot - 2C) qdot = 0 power-balance identity.
Mat6 coriolis_matrix(const GeneralizedState& s, const VehicleParams& veh,
                     const LoadParams& load);

/// Gradient of the gravitational potential, g(q) = dP/dq with
/// P = -sum_i m_i g_vec' p_i(q); analytic in both blocks.
Vec6 gravity_vector(const GeneralizedState& s, const VehicleParams& veh,
                    const LoadParams& load);

/// 6x8 map from rotor thrusts to generalized forces. Column p is
/// [R e3; W'(skew(prop_pos[p]) e3 + spin_dir[p] k_b e3)].
Mat68 input_matrix(const GeneralizedState& s, const VehicleParams& veh);

/// Solves M qddot = B thrust + external - C qdot - g for qddot.
/// Throws LinearSolveError if the mass matrix is not positive definite.
Vec6 forward_dynamics(const GeneralizedState& s, const GeneralizedForces& f,
                      const VehicleParams& veh, const LoadParams& load);

}  // namespace octoload
