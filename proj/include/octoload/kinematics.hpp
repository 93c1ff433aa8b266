#pragma once

#include "octoload/types.hpp"

namespace octoload {

/// Skew-symmetric cross-product matrix: skew(a) * b == a x b.
Mat3 skew(const Vec3& v);

/// Body-to-world rotation from ZYX Euler angles eta = (phi, theta, psi):
/// R = Rz(psi) * Ry(theta) * Rx(phi).
Mat3 rotation_zyx(const Vec3& eta);

/// W(eta) mapping Euler-angle rates to body angular velocity,
/// omega_body = W(eta) * etadot.
Mat3 euler_rate_matrix(const Vec3& eta);

/// Inverse of euler_rate_matrix. Throws EulerSingularityError when
/// |cos(theta)| < 1e-6 (the ZYX representation singularity).
Mat3 euler_rate_matrix_inverse(const Vec3& eta);

/// 3x6 Jacobian of the world position of a body-fixed point r:
/// d/dt (xi + R r) = [I3 | -R skew(r) W] qdot.
Mat36 linear_jacobian(const Vec3& eta, const Vec3& r);

/// 3x6 Jacobian mapping qdot to the world angular velocity: [0 | R W].
Mat36 angular_jacobian(const Vec3& eta);

}  // namespace octoload
