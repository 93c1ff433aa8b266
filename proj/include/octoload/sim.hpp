#pragma once

#include <optional>
#include <string>
#include <vector>

#include "octoload/config.hpp"
#include "octoload/control.hpp"
#include "octoload/estimator.hpp"
#include "octoload/rng.hpp"
#include "octoload/types.hpp"

namespace octoload {

/// One logged step. The CSV columns are exactly the fields down to
/// alloc_residual_xy; p_std (posterior parameter standard deviations) is kept
/// in memory for diagnostics but not serialized.
struct LogRow {
  double t = 0.0;
  Vec6 q = Vec6::Zero();
  Vec6 qdot = Vec6::Zero();
  Vec9 y = Vec9::Zero();
  Vec12 xhat = Vec12::Zero();
  Vec2 dhat = Vec2::Zero();
  Vec2 phat = Vec2::Zero();
  Vec8 tau = Vec8::Zero();
  double f_z = 0.0;
  double phi_r = 0.0;
  double theta_r = 0.0;
  double V_c = 0.0;
  double V_r = 0.0;
  double alloc_residual = 0.0;
  double alloc_residual_xy = 0.0;
  Vec2 p_std = Vec2::Zero();
};

struct TrajectoryLog {
  std::vector<LogRow> rows;
};

/// Aggregate quantities of one run, computed from the log and the config.
struct MetricsReport {
  std::size_t steps = 0;
  Vec3 rmse = Vec3::Zero();  ///< per-axis, over the final reference period
  Vec3 terminal_error = Vec3::Zero();  ///< |position error| at the last row
  double mhat_terminal = 0.0, rhat_terminal = 0.0;
  double mhat_min_settled = 0.0, mhat_max_settled = 0.0;  ///< over final quarter
  double rhat_min_settled = 0.0, rhat_max_settled = 0.0;
  double dist_mean_err = 0.0;   ///< mean |dhat_ch - magnitude|, window + 3 s onset
  double quiet_mean_abs = 0.0;  ///< mean |dhat_ch| in the post-window quiet band
  int lyap_violations = 0;      ///< steps with V_c increase > 1e-6
  double lyap_max_increase = 0.0;
  double max_alloc_residual = 0.0;     ///< all torque rows
  double max_alloc_residual_xy = 0.0;  ///< steerable (roll/pitch) rows only
  double max_pair_residual = 0.0;  ///< max |tau_2k-1 - tau_2k| over the run
  double max_sum_residual = 0.0;   ///< max |sum tau - f_z| over the run
  long negative_thrusts = 0;
};

struct RunOptions {
  bool no_noise = false;     ///< zero all measurement-noise draws
  bool true_params = false;  ///< controller consumes the true state and load
  std::optional<std::uint64_t> seed = std::nullopt;  ///< overrides config seed
  std::string out;           ///< CSV path; empty = do not write
};

struct RunResult {
  TrajectoryLog log;
  MetricsReport metrics;
  GeneralizedState final_state;
};

/// One forward-Euler step of the true plant.
GeneralizedState integrate_truth(const GeneralizedState& s,
                                 const GeneralizedForces& f,
                                 const VehicleParams& veh,
                                 const LoadParams& load, double dt);

/// Sensor sample of the true state; noise == nullptr means noise-free.
Vec9 simulate_measurement(const GeneralizedState& s, const Vec9& stddev,
                          MeasurementNoise* noise);

/// Runs the closed loop: measure -> filter -> cascade -> integrate, one row
/// per step. Deterministic for a fixed config and seed.
RunResult run_experiment(const ExperimentConfig& cfg,
                         const RunOptions& opt = {});

/// CSV serialization with a fixed header; values printed round-trip exactly.
void write_log(const TrajectoryLog& log, const std::string& path);
TrajectoryLog read_log(const std::string& path);

MetricsReport compute_metrics(const TrajectoryLog& log,
                              const ExperimentConfig& cfg);
std::string metrics_to_json(const MetricsReport& m);

}  // namespace octoload
