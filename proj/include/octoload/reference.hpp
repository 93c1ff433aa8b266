#pragma once

#include <vector>

#include "octoload/control.hpp"
#include "octoload/types.hpp"

namespace octoload {

/// Closed planar-circle-plus-vertical-cosine reference family:
///   x_r = amp_x cos(2 pi t / period)
///   y_r = amp_y sin(2 pi t / period)
///   z_r = z_offset - amp_z cos(2 pi t / period)
///   psi_r = psi (constant)
/// with analytic first and second derivatives.
struct ReferenceTrajectory {
  double amp_x = 2.0;
  double amp_y = 2.0;
  double z_offset = 9.0;
  double amp_z = 8.0;
  double period = 40.0;
  double psi = 0.0;

  ReferenceSample sample(double t) const;
};

/// One rectangular window of constant exogenous generalized force on a single
/// coordinate (0..5 = x, y, z, phi, theta, psi), active on [t_start, t_end).
struct DisturbanceWindow {
  int channel = 0;
  double magnitude = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Sum of rectangular windows.
struct DisturbanceProfile {
  std::vector<DisturbanceWindow> windows;

  Vec6 at(double t) const;
};

}  // namespace octoload
