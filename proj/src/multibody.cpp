#include "octoload/multibody.hpp"

#include <cmath>
#include <string>

#include "octoload/kinematics.hpp"

namespace octoload {

namespace {

constexpr double kCoriolisFdStep = 1e-6;

// Clamped copy used wherever a (possibly estimated, possibly negative) load
// enters the dynamics: masses and radii below zero are projected to zero so
// the mass matrix stays positive definite.
LoadParams clamped(const LoadParams& load) {
  return LoadParams{std::max(load.m_L, 0.0), std::max(load.r_L, 0.0)};
}

}  // namespace

void VehicleParams::validate() const {
  if (!(m_O > 0.0)) throw ConfigError("vehicle.m_O must be positive");
  if (!(b > 0.0)) throw ConfigError("vehicle.b must be positive");
  if (!(k_tau > 0.0)) throw ConfigError("vehicle.k_tau must be positive");
  if (std::abs(k_b - k_tau / b) > 1e-12 * std::max(1.0, std::abs(k_b))) {
    throw ConfigError("vehicle.k_b must equal k_tau / b");
  }
  if (!(g < 0.0)) throw ConfigError("vehicle.g must be negative (z up)");
  if (delta_L < 0.0) throw ConfigError("vehicle.delta_L must be non-negative");
  if (std::abs(std::abs(varsigma) - 1.0) > 0.0) {
    throw ConfigError("vehicle.varsigma must be +1 or -1");
  }
  for (int p = 0; p < 8; ++p) {
    if (std::abs(std::abs(spin_dir[p]) - 1.0) > 0.0) {
      throw ConfigError("vehicle.spin_dir[" + std::to_string(p) +
                        "] must be +1 or -1");
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(I_O);
  if (es.eigenvalues().minCoeff() <= 0.0 ||
      (I_O - I_O.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ConfigError("vehicle.I_O must be symmetric positive definite");
  }
}

Mat3 LoadParams::inertia() const {
  const LoadParams c = clamped(*this);
  return (c.m_L / 6.0) * c.r_L * c.r_L * Mat3::Identity();
}

Vec3 load_offset(const VehicleParams& veh, const LoadParams& load) {
  const LoadParams c = clamped(load);
  return Vec3(0.0, 0.0, veh.varsigma * (veh.delta_L + c.r_L));
}

double propeller_thrust(double omega, const VehicleParams& veh) {
  return veh.b * omega * omega;
}

double propeller_torque(double omega, int p, const VehicleParams& veh) {
  return veh.spin_dir.at(static_cast<std::size_t>(p)) * veh.k_tau * omega *
         omega;
}

namespace {

Mat6 mass_matrix_at(const Vec3& eta, const VehicleParams& veh,
                    const LoadParams& load) {
  const LoadParams ld = clamped(load);
  const Mat3 r = rotation_zyx(eta);
  const Mat3 w = euler_rate_matrix(eta);
  const Vec3 p_l = load_offset(veh, ld);
  const Mat3 s_o = skew(veh.r_O);
  const Mat3 s_l = skew(p_l);

  const double m_tot = veh.m_O + ld.m_L;
  const Mat3 mixed = veh.m_O * s_o + ld.m_L * s_l;  // sum_i m_i skew(com_i)
  const Mat3 gamma = -veh.m_O * s_o * s_o - ld.m_L * s_l * s_l + veh.I_O +
                     ld.inertia();

  Mat6 m;
  m.topLeftCorner<3, 3>() = m_tot * Mat3::Identity();
  m.topRightCorner<3, 3>() = -r * mixed * w;
  m.bottomLeftCorner<3, 3>() = m.topRightCorner<3, 3>().transpose();
  m.bottomRightCorner<3, 3>() = w.transpose() * gamma * w;
  return m;
}

}  // namespace

Mat6 mass_matrix(const GeneralizedState& s, const VehicleParams& veh,
                 const LoadParams& load) {
  return mass_matrix_at(s.eta(), veh, load);
}

Mat6 coriolis_matrix(const GeneralizedState& s, const VehicleParams& veh,
                     const LoadParams& load) {
  // dM/dq for the three attitude coordinates by central differences; the mass
  // matrix does not depend on position, so those partials vanish.
  Mat6 dm[3];
  for (int k = 0; k < 3; ++k) {
    Vec3 ep = s.eta(), em = s.eta();
    ep[k] += kCoriolisFdStep;
    em[k] -= kCoriolisFdStep;
    dm[k] = (mass_matrix_at(ep, veh, load) - mass_matrix_at(em, veh, load)) /
            (2.0 * kCoriolisFdStep);
  }
  const auto dM = [&dm](int coord) -> const Mat6* {
    return coord < 3 ? nullptr : &dm[coord - 3];
  };

  Mat6 c = Mat6::Zero();
  for (int k = 0; k < 6; ++k) {
    for (int j = 0; j < 6; ++j) {
      double ckj = 0.0;
      for (int i = 0; i < 6; ++i) {
        double gamma = 0.0;
        if (const Mat6* m = dM(i)) gamma += (*m)(k, j);
        if (const Mat6* m = dM(j)) gamma += (*m)(k, i);
        if (const Mat6* m = dM(k)) gamma -= (*m)(i, j);
        ckj += 0.5 * gamma * s.qdot[i];
      }
      c(k, j) = ckj;
    }
  }
  return c;
}

Vec6 gravity_vector(const GeneralizedState& s, const VehicleParams& veh,
                    const LoadParams& load) {
  const LoadParams ld = clamped(load);
  const Vec3 eta = s.eta();
  const double cphi = std::cos(eta.x()), sphi = std::sin(eta.x());
  const double cth = std::cos(eta.y()), sth = std::sin(eta.y());

  // d/d eta of the bottom row of R (the only row gravity sees, since the
  // potential is -sum_i m_i g * (p_i)_z).
  const Eigen::RowVector3d drz_dphi(0.0, cth * cphi, -cth * sphi);
  const Eigen::RowVector3d drz_dth(-cth, -sth * sphi, -sth * cphi);

  const Vec3 weighted =
      veh.m_O * veh.r_O + ld.m_L * load_offset(veh, ld);  // sum_i m_i com_i

  Vec6 gv;
  gv.head<3>() = Vec3(0.0, 0.0, -(veh.m_O + ld.m_L) * veh.g);
  gv[3] = -veh.g * drz_dphi.dot(weighted);
  gv[4] = -veh.g * drz_dth.dot(weighted);
  gv[5] = 0.0;  // the bottom row of R does not depend on psi
  return gv;
}

Mat68 input_matrix(const GeneralizedState& s, const VehicleParams& veh) {
  const Mat3 r = rotation_zyx(s.eta());
  const Mat3 wt = euler_rate_matrix(s.eta()).transpose();
  const Vec3 ez(0.0, 0.0, 1.0);
  const Vec3 r_ez = r * ez;

  Mat68 b;
  for (int p = 0; p < 8; ++p) {
    b.col(p).head<3>() = r_ez;
    b.col(p).tail<3>() =
        wt * (skew(veh.prop_pos[static_cast<std::size_t>(p)]) * ez +
              veh.spin_dir[static_cast<std::size_t>(p)] * veh.k_b * ez);
  }
  return b;
}

Vec6 forward_dynamics(const GeneralizedState& s, const GeneralizedForces& f,
                      const VehicleParams& veh, const LoadParams& load) {
  const Mat6 m = mass_matrix(s, veh, load);
  const Mat6 c = coriolis_matrix(s, veh, load);
  const Vec6 g = gravity_vector(s, veh, load);
  const Mat68 b = input_matrix(s, veh);

  const Vec6 rhs = b * f.thrust + f.external - c * s.qdot - g;
  Eigen::LLT<Mat6> llt(m);
  if (llt.info() != Eigen::Success) {
    throw LinearSolveError(
        "forward_dynamics: mass matrix is not positive definite");
  }
  return llt.solve(rhs);
}

}  // namespace octoload
