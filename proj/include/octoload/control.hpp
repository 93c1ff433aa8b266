#pragma once

#include "octoload/care.hpp"
#include "octoload/multibody.hpp"
#include "octoload/types.hpp"

namespace octoload {

/// One sample of the position/heading reference with the derivatives the
/// controller consumes.
struct ReferenceSample {
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 acc = Vec3::Zero();
  double psi = 0.0;
  double psi_dot = 0.0;
  double psi_ddot = 0.0;
};

/// Output of the attitude extraction: collective thrust along body z and the
/// roll/pitch references realizing the commanded translational force.
struct AttitudeCommand {
  double f_z = 0.0;
  double phi_r = 0.0;
  double theta_r = 0.0;
};

/// Result of the constrained thrust allocation.
struct AllocationResult {
  Vec8 thrust = Vec8::Zero();
  double residual = 0.0;      ///< || u_bar_star - B_bar * thrust ||
  double residual_xy = 0.0;   ///< same norm over the roll/pitch rows only
  int negative_thrusts = 0;   ///< count of tau_p < 0 (logged, not an error)
  int rank = 3;  ///< steerable objective directions kept by the solve (3
                 ///< unless the geometry collapses one, e.g. yaw at level
                 ///< attitude under equal coaxial pairs)
};

/// Everything one controller step produces (logged every step).
struct ControlCommand {
  Vec8 thrust = Vec8::Zero();
  AttitudeCommand attitude;
  Vec3 u_star = Vec3::Zero();      ///< translational force command
  Vec3 u_bar_star = Vec3::Zero();  ///< reduced attitude torque command
  double alloc_residual = 0.0;     ///< || u_bar_star - B_bar tau ||, all rows
  double alloc_residual_xy = 0.0;  ///< same norm over the steerable rows
  int negative_thrusts = 0;
  Vec9 chi_c = Vec9::Zero();
  Vec9 chi_r = Vec9::Zero();
  double V_c = 0.0;  ///< 0.5 chi_c' Q_c chi_c
  double V_r = 0.0;  ///< 0.5 chi_r' Q_r chi_r
};

/// Translational force command
///   u* = -M_cc (Y3^-1 [Q chi]_rate + h_c),
/// where h_c collects the model feedforward (attitude-acceleration reaction,
/// Coriolis, gravity, reference acceleration) evaluated at the estimated state
/// and load. qddot_r is the attitude acceleration to compensate; with a heavy
/// offset load the -M_cr qddot_r reaction is far too large to treat as a
/// perturbation, and the cascade supplies the acceleration its rotational
/// stage commanded one step earlier.
Vec3 translational_control(const Vec9& chi_c, const GeneralizedState& s,
                           const Vec3& qddot_r,
                           const ReferenceSample& ref, const Mat9& Q_c,
                           const Vec3& Y3_c, const VehicleParams& veh,
                           const LoadParams& load);

/// Inverts the zero-heading thrust-direction map for (f_z, phi_r, theta_r):
///   f_z = u3 / (cos phi cos theta),  phi_r = asin(-u2 / f_z),
///   theta_r = asin(u1 / (cos phi_r f_z)).
/// Throws AllocationDomainError when |cos phi| or |cos theta| < 1e-6, f_z <= 0,
/// or an asin argument leaves [-1, 1].
AttitudeCommand attitude_allocation(const Vec3& u_star, double phi,
                                    double theta);

/// Schur complements of the 6x6 model onto the attitude block, evaluated at
/// the estimated state and load (exposed for testing and allocation).
struct ReducedAttitudeModel {
  Mat3 M_bar = Mat3::Zero();
  Mat3 C_bar = Mat3::Zero();
  Vec3 e_bar = Vec3::Zero();
};
ReducedAttitudeModel reduce_attitude_model(const GeneralizedState& s,
                                           const VehicleParams& veh,
                                           const LoadParams& load);

/// Attitude torque command
///   u_bar* = -M_bar Y3^-1 [Q chi]_rate + C_bar (etadot - etadot_ref) + d_bar
/// with d_bar = C_bar etadot_ref + e_bar.  etadot_ref carries the attitude
/// reference rate (roll/pitch from the command filter on the allocation
/// output, yaw from the trajectory), so the two C_bar terms together cancel
/// the full C_bar etadot of the plant.
Vec3 rotational_control(const Vec9& chi_r, const GeneralizedState& s,
                        const Vec3& etadot_ref, const Mat9& Q_r,
                        const Vec3& Y3_r, const VehicleParams& veh,
                        const LoadParams& load);

/// 3x8 reduced input matrix B_bar = B_r - M_rc M_cc^-1 B_c mapping rotor
/// thrusts to the reduced attitude dynamics.
Mat38 effective_input_matrix(const GeneralizedState& s,
                             const VehicleParams& veh, const LoadParams& load);

/// Least-squares thrust allocation
///   min 0.5 || u_bar* - B_bar tau ||^2
///   s.t. tau1 = tau2, tau3 = tau4, tau5 = tau6, tau7 = tau8,
///        sum tau = f_z,
/// solved through the 13x13 KKT system, followed by an exactness polish that
/// re-imposes the equality constraints to machine precision. Throws
/// KktSingularError when the KKT matrix is singular.
AllocationResult thrust_allocation(const Vec3& u_bar_star, double f_z,
                                   const Mat38& B_bar);

/// The full cascade: translational force -> attitude extraction -> attitude
/// torque -> constrained allocation. Owns the two error integrators (the only
/// controller state); everything else is recomputed from the estimates each
/// step. One instance per control loop; not safe for concurrent use.
class CascadeController {
 public:
  CascadeController(const WeightSet& translational, const WeightSet& rotational,
                    const VehicleParams& veh);

  /// Computes thrusts from the current state/load estimates and reference,
  /// then advances both error integrators by dt.
  ControlCommand step(const GeneralizedState& estimate,
                      const LoadParams& load_estimate,
                      const ReferenceSample& ref, double dt);

  void reset();

  /// Mutable controller memory (error integrators and the one-step attitude
  /// acceleration latch).  Exposed so a run can be checkpointed and resumed
  /// bit-exactly.
  struct Memory {
    Vec3 int_c = Vec3::Zero();
    Vec3 int_r = Vec3::Zero();
    Vec3 qddot_r_cmd = Vec3::Zero();
    Vec2 att_ref_filt = Vec2::Zero();  ///< command-filtered roll/pitch ref
    bool att_filt_init = false;
  };
  Memory memory() const {
    return {int_c_, int_r_, qddot_r_cmd_, att_ref_filt_, att_filt_init_};
  }
  void set_memory(const Memory& m) {
    int_c_ = m.int_c;
    int_r_ = m.int_r;
    qddot_r_cmd_ = m.qddot_r_cmd;
    att_ref_filt_ = m.att_ref_filt;
    att_filt_init_ = m.att_filt_init;
  }

  const RiccatiSolution& translational_gains() const { return gains_c_; }
  const RiccatiSolution& rotational_gains() const { return gains_r_; }
  Vec3 integral_translational() const { return int_c_; }
  Vec3 integral_rotational() const { return int_r_; }

 private:
  WeightSet w_c_, w_r_;
  RiccatiSolution gains_c_, gains_r_;
  VehicleParams veh_;
  Vec3 int_c_ = Vec3::Zero();
  Vec3 int_r_ = Vec3::Zero();
  // Attitude acceleration commanded by the previous step's rotational stage;
  // feeds the -M_cr qddot_r reaction feedforward of the translational stage.
  Vec3 qddot_r_cmd_ = Vec3::Zero();
  // First-order command filter on the allocation's roll/pitch reference.  The
  // attitude loop tracks the filtered reference together with the filter
  // ODE's own rate, giving a consistent, bandlimited (reference, rate) pair.
  // Differencing the raw reference instead puts sampling-rate gain into the
  // torque demand, which the thrust allocation realizes exactly and the
  // rigid body+load coupling turns back into force -- an unstable loop at
  // high frequency.
  Vec2 att_ref_filt_ = Vec2::Zero();
  bool att_filt_init_ = false;
};

}  // namespace octoload
