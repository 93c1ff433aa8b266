#include "octoload/kinematics.hpp"

#include <cmath>

namespace octoload {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

Mat3 rotation_zyx(const Vec3& eta) {
  const double cphi = std::cos(eta.x()), sphi = std::sin(eta.x());
  const double cth = std::cos(eta.y()), sth = std::sin(eta.y());
  const double cpsi = std::cos(eta.z()), spsi = std::sin(eta.z());
  Mat3 r;
  r << cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi,
       spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi,
       -sth, cth * sphi, cth * cphi;
  return r;
}

Mat3 euler_rate_matrix(const Vec3& eta) {
  const double cphi = std::cos(eta.x()), sphi = std::sin(eta.x());
  const double cth = std::cos(eta.y()), sth = std::sin(eta.y());
  Mat3 w;
  w << 1.0, 0.0, -sth,
       0.0, cphi, cth * sphi,
       0.0, -sphi, cphi * cth;
  return w;
}

Mat3 euler_rate_matrix_inverse(const Vec3& eta) {
  const double cth = std::cos(eta.y());
  if (std::abs(cth) < 1e-6) {
    throw EulerSingularityError(
        "euler_rate_matrix_inverse: |cos(theta)| < 1e-6 at theta = " +
        std::to_string(eta.y()));
  }
  const double cphi = std::cos(eta.x()), sphi = std::sin(eta.x());
  const double sth = std::sin(eta.y());
  const double tth = sth / cth;
  Mat3 winv;
  winv << 1.0, sphi * tth, cphi * tth,
          0.0, cphi, -sphi,
          0.0, sphi / cth, cphi / cth;
  return winv;
}

Mat36 linear_jacobian(const Vec3& eta, const Vec3& r) {
  Mat36 j;
  j.leftCols<3>() = Mat3::Identity();
  j.rightCols<3>() = -rotation_zyx(eta) * skew(r) * euler_rate_matrix(eta);
  return j;
}

Mat36 angular_jacobian(const Vec3& eta) {
  Mat36 j;
  j.leftCols<3>() = Mat3::Zero();
  j.rightCols<3>() = rotation_zyx(eta) * euler_rate_matrix(eta);
  return j;
}

}  // namespace octoload
