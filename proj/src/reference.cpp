#include "octoload/reference.hpp"

#include <cmath>
#include <numbers>

namespace octoload {

ReferenceSample ReferenceTrajectory::sample(double t) const {
  const double w = 2.0 * std::numbers::pi / period;
  const double c = std::cos(w * t), s = std::sin(w * t);

  ReferenceSample r;
  r.pos = Vec3(amp_x * c, amp_y * s, z_offset - amp_z * c);
  r.vel = Vec3(-amp_x * w * s, amp_y * w * c, amp_z * w * s);
  r.acc = Vec3(-amp_x * w * w * c, -amp_y * w * w * s, amp_z * w * w * c);
  r.psi = psi;
  r.psi_dot = 0.0;
  r.psi_ddot = 0.0;
  return r;
}

Vec6 DisturbanceProfile::at(double t) const {
  Vec6 zeta = Vec6::Zero();
  for (const DisturbanceWindow& w : windows) {
    if (t >= w.t_start && t < w.t_end) zeta[w.channel] += w.magnitude;
  }
  return zeta;
}

}  // namespace octoload
