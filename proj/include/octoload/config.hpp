#pragma once

#include <cstdint>
#include <string>

#include "octoload/care.hpp"
#include "octoload/estimator.hpp"
#include "octoload/multibody.hpp"
#include "octoload/reference.hpp"
#include "octoload/types.hpp"

namespace octoload {

/// Initial belief and noise variances of the joint filter (diagonals; the
/// filter consumes the assembled covariance matrices).
struct EstimatorSettings {
  Vec12 x0 = Vec12::Zero();          ///< initial mean, pose + velocity block
  Vec2 d0 = Vec2::Zero();            ///< initial disturbance mean
  Vec2 p0 = Vec2::Zero();            ///< initial (m_L, r_L) mean
  Vec12 x0_var = Vec12::Ones();      ///< initial variance, pose + velocity
  Vec2 d0_var = Vec2::Ones();
  Vec2 p0_var = Vec2::Ones();
  Vec16 process_var = Vec16::Zero();  ///< per-step random-walk variances
  Vec9 meas_var = Vec9::Zero();       ///< sensor variances

  NoiseConfig noise() const;
  GaussianBelief initial_belief() const;
};

/// Integration step, horizon, RNG seed and the true initial condition.
struct RunSettings {
  double dt = 0.01;
  double horizon = 80.0;
  std::uint64_t seed = 12345;
  Vec6 q0 = Vec6::Zero();
  Vec6 qdot0 = Vec6::Zero();
};

/// Everything one experiment needs; serializable to/from JSON.
struct ExperimentConfig {
  VehicleParams vehicle;
  LoadParams load;  ///< true load parameters used by the plant
  WeightSet weights_translational;
  WeightSet weights_rotational;
  EstimatorSettings estimator;
  ReferenceTrajectory reference;
  DisturbanceProfile disturbance;
  RunSettings run;

  void validate() const;  ///< throws ConfigError naming the offending field
};

/// The shipped benchmark scenario: 153 kg octocopter + 100 kg sphere on a
/// 0.7 m offset, circular climb reference, 30 N lateral gust on [20, 30) s.
ExperimentConfig default_config();

/// Same scenario with the disturbance removed (used with --no-noise and
/// --true-params for ideal-loop checks).
ExperimentConfig ideal_config();

/// JSON round trip. read_config throws ConfigError naming the missing or
/// malformed field.
ExperimentConfig read_config(const std::string& path);
void write_config(const ExperimentConfig& cfg, const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

}  // namespace octoload
