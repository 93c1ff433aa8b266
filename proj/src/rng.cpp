#include "octoload/rng.hpp"

#include <cmath>
#include <numbers>

namespace octoload {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double GaussianStream::draw() {
  // Trigonometric Box-Muller on two fresh uniforms; u1 is kept away from zero
  // so the log is finite. No spare value is cached.
  constexpr double kNorm = 1.0 / 18446744073709551616.0;  // 2^-64
  const double u1 = (static_cast<double>(eng_()) + 1.0) * kNorm;
  const double u2 = static_cast<double>(eng_()) * kNorm;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

MeasurementNoise::MeasurementNoise(std::uint64_t master_seed)
    : channels_{GaussianStream(splitmix64(master_seed ^ (1ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (2ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (3ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (4ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (5ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (6ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (7ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (8ull * 0x9E3779B97F4A7C15ull))),
                GaussianStream(splitmix64(master_seed ^ (9ull * 0x9E3779B97F4A7C15ull)))} {}

Vec9 MeasurementNoise::draw(const Vec9& stddev) {
  Vec9 out;
  for (int i = 0; i < 9; ++i) {
    out[i] = stddev[i] * channels_[static_cast<std::size_t>(i)].draw();
  }
  return out;
}

}  // namespace octoload
