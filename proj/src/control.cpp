#include "octoload/control.hpp"

#include <cmath>
#include <string>

#include "octoload/kinematics.hpp"

namespace octoload {

namespace {

constexpr double kTrigGuard = 1e-6;

// Cutoff [rad/s] of the first-order command filter on the roll/pitch
// reference produced by the thrust-vector inversion.  Well above the
// slung-load swing frequency (~2 rad/s) and the attitude-loop poles
// (~3.8 rad/s), well below the 100 Hz sampling rate.
constexpr double kAttRefCutoff = 20.0;

// Y3^-1 [Q chi]_rate: the virtual-control block of the tracking feedback.
Vec3 rate_feedback(const Mat9& Q, const Vec3& Y3, const Vec9& chi) {
  return Y3.cwiseInverse().asDiagonal() * (Q * chi).tail<3>();
}

Mat3 solve_spd(const Mat3& m, const Mat3& rhs, const char* who) {
  Eigen::LLT<Mat3> llt(m);
  if (llt.info() != Eigen::Success) {
    throw LinearSolveError(std::string(who) +
                           ": 3x3 block is not positive definite");
  }
  return llt.solve(rhs);
}

// Neumaier-compensated accumulator; add_product also folds in the exact fma
// product error, so a chain of add_product calls behaves like an error-free
// dot product.
struct CompensatedAccumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  void add_product(double a, double b) {
    const double p = a * b;
    add(p);
    comp += std::fma(a, b, -p);
  }
  double value() const { return sum + comp; }
};

// u_bar_star - B_bar * tau with each row evaluated as a compensated dot
// product. Thrust components reach ~1e6 N when the yaw direction of the
// constrained problem is barely observable, and a plain dot product would
// bury the true residual under its own rounding at that scale.
Vec3 allocation_residual(const Vec3& u_bar_star, const Mat38& B_bar,
                         const Vec8& tau) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    CompensatedAccumulator acc;
    acc.add(u_bar_star[i]);
    for (int j = 0; j < 8; ++j) acc.add_product(-B_bar(i, j), tau[j]);
    out[i] = acc.value();
  }
  return out;
}

double constraint_sum_error(const Vec8& tau, double f_z) {
  CompensatedAccumulator acc;
  for (int i = 0; i < 8; ++i) acc.add(tau[i]);
  acc.add(-f_z);
  return acc.value();
}

// Restores the equality constraints on the stored doubles: pair entries are
// made bitwise equal, then the total-thrust drift (entry rounding, ~ulp of
// the largest component) is cancelled. The first sweep spreads the correction
// uniformly; later sweeps apply it to the pair of smallest magnitude, whose
// finer floating-point grid can absorb corrections far below the ulp of the
// large components.
void polish_constraints(Vec8& tau, double f_z) {
  for (int k = 0; k < 4; ++k) {
    const double mid = 0.5 * (tau[2 * k] + tau[2 * k + 1]);
    tau[2 * k] = mid;
    tau[2 * k + 1] = mid;
  }
  for (int pass = 0; pass < 6; ++pass) {
    const double err = constraint_sum_error(tau, f_z);
    if (std::abs(err) <= 1e-13) break;
    if (pass == 0) {
      const double corr = err / 8.0;
      for (int k = 0; k < 4; ++k) {
        const double adjusted = tau[2 * k] - corr;
        tau[2 * k] = adjusted;
        tau[2 * k + 1] = adjusted;
      }
    } else {
      int smallest = 0;
      for (int k = 1; k < 4; ++k) {
        if (std::abs(tau[2 * k]) < std::abs(tau[2 * smallest])) smallest = k;
      }
      const double adjusted = tau[2 * smallest] - err / 2.0;
      tau[2 * smallest] = adjusted;
      tau[2 * smallest + 1] = adjusted;
    }
  }
}

}  // namespace

Vec3 translational_control(const Vec9& chi_c, const GeneralizedState& s,
                           const Vec3& qddot_r,
                           const ReferenceSample& ref, const Mat9& Q_c,
                           const Vec3& Y3_c, const VehicleParams& veh,
                           const LoadParams& load) {
  const Mat6 m = mass_matrix(s, veh, load);
  const Mat6 c = coriolis_matrix(s, veh, load);
  const Vec6 g = gravity_vector(s, veh, load);

  const Mat3 m_cc = m.topLeftCorner<3, 3>();
  const Vec3 bias = -m.topRightCorner<3, 3>() * qddot_r -
                    c.topLeftCorner<3, 3>() * s.xidot() -
                    c.topRightCorner<3, 3>() * s.etadot() - g.head<3>();
  Eigen::LLT<Mat3> llt(m_cc);
  if (llt.info() != Eigen::Success) {
    throw LinearSolveError("translational_control: M_cc not positive definite");
  }
  const Vec3 h_c = llt.solve(bias) - ref.acc;
  return -m_cc * (rate_feedback(Q_c, Y3_c, chi_c) + h_c);
}

AttitudeCommand attitude_allocation(const Vec3& u_star, double phi,
                                    double theta) {
  const double cphi = std::cos(phi), cth = std::cos(theta);
  if (std::abs(cphi) < kTrigGuard || std::abs(cth) < kTrigGuard) {
    throw AllocationDomainError(
        "attitude_allocation: attitude too close to the representation "
        "singularity (|cos phi| or |cos theta| < 1e-6)");
  }
  AttitudeCommand cmd;
  cmd.f_z = u_star.z() / (cphi * cth);
  if (!(cmd.f_z > 0.0)) {
    throw AllocationDomainError(
        "attitude_allocation: non-positive collective thrust " +
        std::to_string(cmd.f_z));
  }
  const double arg_phi = -u_star.y() / cmd.f_z;
  if (std::abs(arg_phi) > 1.0) {
    throw AllocationDomainError(
        "attitude_allocation: roll asin argument out of range: " +
        std::to_string(arg_phi));
  }
  cmd.phi_r = std::asin(arg_phi);
  const double cphi_r = std::cos(cmd.phi_r);
  if (std::abs(cphi_r) < kTrigGuard) {
    throw AllocationDomainError(
        "attitude_allocation: commanded roll too close to +-pi/2");
  }
  const double arg_th = u_star.x() / (cphi_r * cmd.f_z);
  if (std::abs(arg_th) > 1.0) {
    throw AllocationDomainError(
        "attitude_allocation: pitch asin argument out of range: " +
        std::to_string(arg_th));
  }
  cmd.theta_r = std::asin(arg_th);
  return cmd;
}

ReducedAttitudeModel reduce_attitude_model(const GeneralizedState& s,
                                           const VehicleParams& veh,
                                           const LoadParams& load) {
  const Mat6 m = mass_matrix(s, veh, load);
  const Mat6 c = coriolis_matrix(s, veh, load);
  const Vec6 g = gravity_vector(s, veh, load);

  // T = M_rc M_cc^-1 eliminates the translational acceleration.
  const Mat3 t =
      solve_spd(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 3>(),
                "reduce_attitude_model")
          .transpose();

  ReducedAttitudeModel red;
  red.M_bar = m.bottomRightCorner<3, 3>() - t * m.topRightCorner<3, 3>();
  red.C_bar = c.bottomRightCorner<3, 3>() - t * c.topRightCorner<3, 3>();
  red.e_bar = g.tail<3>() - t * g.head<3>() +
              (c.bottomLeftCorner<3, 3>() - t * c.topLeftCorner<3, 3>()) *
                  s.xidot();
  return red;
}

Vec3 rotational_control(const Vec9& chi_r, const GeneralizedState& s,
                        const Vec3& etadot_ref, const Mat9& Q_r,
                        const Vec3& Y3_r, const VehicleParams& veh,
                        const LoadParams& load) {
  const ReducedAttitudeModel red = reduce_attitude_model(s, veh, load);
  const Vec3 d_bar = red.C_bar * etadot_ref + red.e_bar;
  const Vec3 err_rate = chi_r.tail<3>();
  // The paired, counter-rotating thrust constraints confine realizable torque
  // to the roll/pitch plane, so the yaw feedback channel can never be
  // actuated.  Its demand would still leak into the roll/pitch rows through
  // the off-diagonal inertia coupling of M_bar — and the yaw error integral
  // grows without bound — so the unactuated channel is excluded here.
  Vec3 demand = rate_feedback(Q_r, Y3_r, chi_r);
  demand[2] = 0.0;
  return -red.M_bar * demand + red.C_bar * err_rate + d_bar;
}

Mat38 effective_input_matrix(const GeneralizedState& s,
                             const VehicleParams& veh,
                             const LoadParams& load) {
  const Mat6 m = mass_matrix(s, veh, load);
  const Mat68 b = input_matrix(s, veh);
  const Mat3 t =
      solve_spd(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 3>(),
                "effective_input_matrix")
          .transpose();
  return b.bottomRows<3>() - t * b.topRows<3>();
}

AllocationResult thrust_allocation(const Vec3& u_bar_star, double f_z,
                                   const Mat38& B_bar) {
  if (!u_bar_star.allFinite() || !B_bar.allFinite() || !std::isfinite(f_z) ||
      f_z <= 0.0) {
    throw KktSingularError(
        "thrust_allocation: non-finite input or non-positive total thrust");
  }

  // Null-space method for the KKT optimality system of the constrained least
  // squares: every feasible tau is (f_z/8)*1 + Z y, where the orthonormal
  // columns of Z span {pairs equal, total zero}. Each column carries identical
  // entries on each pair, so feasible thrusts are bitwise pair-equal by
  // construction, and the 3x3 reduced problem in y is solved by SVD.
  static const Eigen::Matrix<double, 8, 3> Z = [] {
    Eigen::Matrix<double, 8, 3> z;
    const double h = 0.5;
    const double q = 0.5 / std::sqrt(2.0);
    z.col(0) << h, h, -h, -h, 0, 0, 0, 0;
    z.col(1) << 0, 0, 0, 0, h, h, -h, -h;
    z.col(2) << q, q, q, q, -q, -q, -q, -q;
    return z;
  }();

  const Vec8 tau_uniform = Vec8::Constant(f_z / 8.0);
  const Mat3 G = B_bar * Z;
  Eigen::JacobiSVD<Mat3> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[0] > 1e-12)) {
    throw KktSingularError(
        "thrust_allocation: objective matrix vanishes on the constraint set");
  }
  const int rank = (sv[1] > 1e-9 * sv[0]) + (sv[2] > 1e-9 * sv[0]) + 1;
  if (rank < 2) {
    throw KktSingularError(
        "thrust_allocation: constrained thrusts cannot steer roll and pitch "
        "independently (degenerate attitude/geometry)");
  }

  AllocationResult out;
  out.rank = rank;
  Vec3 y = Vec3::Zero();
  out.thrust = tau_uniform;
  polish_constraints(out.thrust, f_z);

  // Equal coaxial counter-rotating pairs cancel all drag torques, and the
  // moments of parallel body-z thrusts have no body-z component, so the body
  // torques this constraint set can produce span only the body x-y plane:
  // G's yaw row is a fixed combination of its roll and pitch rows at every
  // attitude, and the full system is rank 2. Projecting an unreachable yaw
  // demand onto that plane (the plain least-squares optimum) would bleed it
  // into the realized roll/pitch torques, so in the rank-2 case the solve
  // matches the two steerable torque rows exactly and leaves the dependent
  // row to follow; for consistent targets the two solutions coincide. A full
  // rank-3 objective (a geometry with true yaw authority) is solved whole.
  //
  // One direct solve plus two iterative-refinement sweeps in either path:
  // refinement works from the compensated residual of the stored thrusts, so
  // the solved rows are matched to machine accuracy even when conditioning is
  // poor, and the constraint polish inside the loop lets the final sweep
  // absorb its tiny objective shift.
  if (rank == 3) {
    for (int pass = 0; pass < 3; ++pass) {
      const Vec3 resid = allocation_residual(u_bar_star, B_bar, out.thrust);
      const Vec3 coef = svd.matrixU().transpose() * resid;
      Vec3 dy = Vec3::Zero();
      for (int i = 0; i < 3; ++i) {
        dy += (coef[i] / sv[i]) * svd.matrixV().col(i);
      }
      y += dy;
      out.thrust = tau_uniform + Z * y;
      polish_constraints(out.thrust, f_z);
    }
  } else {
    const Eigen::Matrix<double, 2, 3> G2 = G.topRows<2>();
    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd2(
        G2, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector2d sv2 = svd2.singularValues();
    if (!(sv2[1] > 1e-9 * sv2[0])) {
      throw KktSingularError(
          "thrust_allocation: constrained thrusts cannot steer roll and pitch "
          "independently (degenerate attitude/geometry)");
    }
    for (int pass = 0; pass < 3; ++pass) {
      const Vec3 resid = allocation_residual(u_bar_star, B_bar, out.thrust);
      const Eigen::Vector2d coef = svd2.matrixU().transpose() * resid.head<2>();
      Vec3 dy = Vec3::Zero();
      for (int i = 0; i < 2; ++i) {
        dy += (coef[i] / sv2[i]) * svd2.matrixV().col(i);
      }
      y += dy;
      out.thrust = tau_uniform + Z * y;
      polish_constraints(out.thrust, f_z);
    }
  }

  const Vec3 final_resid = allocation_residual(u_bar_star, B_bar, out.thrust);
  out.residual = final_resid.norm();
  out.residual_xy = final_resid.head<2>().norm();
  for (int i = 0; i < 8; ++i) {
    if (out.thrust[i] < 0.0) ++out.negative_thrusts;
  }
  return out;
}

CascadeController::CascadeController(const WeightSet& translational,
                                     const WeightSet& rotational,
                                     const VehicleParams& veh)
    : w_c_(translational), w_r_(rotational), veh_(veh) {
  w_c_.validate();
  w_r_.validate();
  gains_c_ = solve_tracking_gains(w_c_);
  gains_r_ = solve_tracking_gains(w_r_);
}

ControlCommand CascadeController::step(const GeneralizedState& estimate,
                                       const LoadParams& load_estimate,
                                       const ReferenceSample& ref, double dt) {
  ControlCommand cmd;

  const Vec3 err_c = estimate.xi() - ref.pos;
  cmd.chi_c << int_c_, err_c, estimate.xidot() - ref.vel;
  cmd.u_star = translational_control(cmd.chi_c, estimate, qddot_r_cmd_, ref,
                                     gains_c_.Q, w_c_.Y3, veh_, load_estimate);
  // The thrust vector realizes its horizontal force rotated by the yaw
  // angle, while the asin inversion below solves the yaw-free map.  Express
  // the force command in the yaw-aligned frame first; otherwise the realized
  // horizontal force is rotated against the command and the position/attitude
  // cascade loses its stability margin once |psi| grows past ~0.25 rad.
  const double cpsi = std::cos(estimate.q[5]);
  const double spsi = std::sin(estimate.q[5]);
  const Vec3 u_alloc(cpsi * cmd.u_star[0] + spsi * cmd.u_star[1],
                     -spsi * cmd.u_star[0] + cpsi * cmd.u_star[1],
                     cmd.u_star[2]);
  cmd.attitude = attitude_allocation(u_alloc, estimate.q[3], estimate.q[4]);

  // The allocation output is a genuine time-varying reference: its rate
  // belongs in the attitude error rate, and dropping it costs the attitude
  // loop ~50 degrees of phase at the slung-load swing frequency (~2 rad/s),
  // tipping the position/attitude cascade unstable.  Differencing the raw
  // reference is no better: the 1/dt gain reaches the torque demand, the
  // thrust allocation realizes it exactly, and the rigid coupling feeds it
  // back as force -- unstable near the sampling rate.  A first-order command
  // filter resolves both: the loop tracks the filtered reference paired with
  // the filter ODE's own bandlimited rate.
  const Vec2 att_ref_raw(cmd.attitude.phi_r, cmd.attitude.theta_r);
  if (!att_filt_init_) {
    att_ref_filt_ = att_ref_raw;
    att_filt_init_ = true;
  }
  const double decay = std::exp(-kAttRefCutoff * dt);
  att_ref_filt_ = att_ref_raw + decay * (att_ref_filt_ - att_ref_raw);
  const Vec2 att_rate_filt = kAttRefCutoff * (att_ref_raw - att_ref_filt_);

  const Vec3 eta_ref(att_ref_filt_[0], att_ref_filt_[1], ref.psi);
  const Vec3 err_r = estimate.eta() - eta_ref;
  const Vec3 etadot_ref(att_rate_filt[0], att_rate_filt[1], ref.psi_dot);
  cmd.chi_r << int_r_, err_r, estimate.etadot() - etadot_ref;
  cmd.u_bar_star = rotational_control(cmd.chi_r, estimate, etadot_ref,
                                      gains_r_.Q, w_r_.Y3, veh_, load_estimate);
  // Attitude acceleration the rotational stage just asked for; the next
  // translational solve compensates its -M_cr reaction instead of treating
  // the (large, slung-load) coupling as an unmodeled perturbation.  Only the
  // roll/pitch demands are kept: the thrust constraints confine realizable
  // torque to the roll/pitch plane, so the yaw feedback channel never turns
  // into acceleration, and compensating a reaction that cannot occur would
  // inject force through the tilt-dependent yaw column of the coupling
  // inertia.  Yaw uses the reference acceleration instead.
  //
  // The latched demand is evaluated WITHOUT the filtered reference rate: that
  // rate depends algebraically on the current force command through the
  // allocation, so routing it through this feedforward into the next force
  // command closes a loop of gain M_cr k_d w_f / f_z > 1 that rings at the
  // sampling rate.  The torque itself keeps the rate term (a torque-side
  // path with ample attenuation); only the force-side loop is broken here,
  // at the cost of a small, bounded feedforward mismatch ~k_d |rate_ref|.
  Vec9 chi_latch = cmd.chi_r;
  chi_latch.tail<3>() = estimate.etadot() - Vec3(0.0, 0.0, ref.psi_dot);
  const Vec3 accel_demand = -rate_feedback(gains_r_.Q, w_r_.Y3, chi_latch);
  qddot_r_cmd_ = Vec3(accel_demand[0], accel_demand[1], ref.psi_ddot);

  const Mat38 b_bar = effective_input_matrix(estimate, veh_, load_estimate);
  const AllocationResult alloc =
      thrust_allocation(cmd.u_bar_star, cmd.attitude.f_z, b_bar);
  cmd.thrust = alloc.thrust;
  cmd.alloc_residual = alloc.residual;
  cmd.alloc_residual_xy = alloc.residual_xy;
  cmd.negative_thrusts = alloc.negative_thrusts;

  cmd.V_c = 0.5 * cmd.chi_c.dot(gains_c_.Q * cmd.chi_c);
  cmd.V_r = 0.5 * cmd.chi_r.dot(gains_r_.Q * cmd.chi_r);

  int_c_ += err_c * dt;
  int_r_ += err_r * dt;
  return cmd;
}

void CascadeController::reset() {
  int_c_.setZero();
  int_r_.setZero();
  qddot_r_cmd_.setZero();
  att_ref_filt_.setZero();
  att_filt_init_ = false;
}

}  // namespace octoload
