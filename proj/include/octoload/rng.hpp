#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "octoload/types.hpp"

namespace octoload {

/// splitmix64 step, used to derive independent per-channel seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic standard-normal stream: std::mt19937_64 + trigonometric
/// Box-Muller. Every draw consumes exactly two uniforms (no cached spare), so
/// the stream position is a pure function of the draw count.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double draw();

 private:
  std::mt19937_64 eng_;
};

/// Nine independent noise channels, one per sensor coordinate. Channel i is
/// seeded with splitmix64(master_seed ^ (i + 1) * golden) so channels do not
/// collide and a seed change moves every channel.
class MeasurementNoise {
 public:
  explicit MeasurementNoise(std::uint64_t master_seed);

  /// One draw per channel, scaled by the per-channel standard deviations.
  Vec9 draw(const Vec9& stddev);

 private:
  std::array<GaussianStream, 9> channels_;
};

}  // namespace octoload
