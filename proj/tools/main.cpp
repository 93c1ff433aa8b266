#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>

#include "octoload/config.hpp"
#include "octoload/control.hpp"
#include "octoload/kinematics.hpp"
#include "octoload/sim.hpp"

namespace {

using namespace octoload;

// Engine-bit uniform in [lo, hi); avoids the implementation-defined
// std::uniform_real_distribution so results are stable across toolchains.
double uniform(std::mt19937_64& eng, double lo, double hi) {
  const double u =
      static_cast<double>(eng() >> 11) * (1.0 / 9007199254740992.0);
  return lo + (hi - lo) * u;
}

int cmd_run(const std::string& config_path, bool no_noise, bool true_params,
            std::optional<std::uint64_t> seed, const std::string& out) {
  const ExperimentConfig cfg = read_config(config_path);
  RunOptions opt;
  opt.no_noise = no_noise;
  opt.true_params = true_params;
  opt.seed = seed;
  opt.out = out;
  const RunResult res = run_experiment(cfg, opt);
  std::cout << metrics_to_json(res.metrics);
  return 0;
}

int check_weight_set(const char* name, const WeightSet& w) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const CareMatrices mats = build_care_matrices(w);
  RiccatiSolution sol;
  try {
    sol = solve_care(mats.A, mats.B, mats.Psi);
  } catch (const Error& e) {
    std::cout << "[FAIL] " << name << ": " << e.what() << "\n";
    return 1;
  }
  const double ms =
      std::chrono::duration<double, std::milli>(clock::now() - t0).count();

  const Eigen::SelfAdjointEigenSolver<Mat9> qe(sol.Q);
  const Eigen::EigenSolver<Mat9> cl(mats.A - mats.B * sol.Q);
  const double min_eig = qe.eigenvalues().minCoeff();
  const double max_re = cl.eigenvalues().real().maxCoeff();
  const bool ok = sol.residual <= 1e-8 && min_eig > 0.0 && max_re < 0.0;
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name
            << ": residual = " << sol.residual << ", min eig(Q) = " << min_eig
            << ", max Re(closed-loop eig) = " << max_re << ", solve time = "
            << ms << " ms\n";
  return ok ? 0 : 1;
}

int cmd_care_check(const std::string& config_path) {
  const ExperimentConfig cfg = read_config(config_path);
  int rc = 0;
  rc |= check_weight_set("translational", cfg.weights_translational);
  rc |= check_weight_set("rotational", cfg.weights_rotational);
  return rc;
}

int cmd_alloc_check(const std::string& config_path) {
  const ExperimentConfig cfg = read_config(config_path);
  std::mt19937_64 eng(0x0c70a11ull);

  // Attitude extraction round trip: build the commanded force from a known
  // (f_z, phi_r, theta_r) at zero heading and recover it.
  double max_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double phi = uniform(eng, -1.2, 1.2);
    const double th = uniform(eng, -1.2, 1.2);
    const double fz = uniform(eng, 100.0, 3000.0);
    const Vec3 u(std::cos(phi) * std::sin(th) * fz, -std::sin(phi) * fz,
                 std::cos(phi) * std::cos(th) * fz);
    const AttitudeCommand cmd = attitude_allocation(u, phi, th);
    max_rt = std::max({max_rt, std::abs(cmd.f_z - fz),
                       std::abs(cmd.phi_r - phi), std::abs(cmd.theta_r - th)});
  }
  const bool rt_ok = max_rt <= 1e-9;
  std::cout << (rt_ok ? "[PASS] " : "[FAIL] ")
            << "attitude round trip: max error = " << max_rt << "\n";

  // Constrained allocation: a feasible thrust vector must be recovered with
  // matching torque map and machine-exact constraints.
  double max_resid = 0.0, max_pair = 0.0, max_sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    GeneralizedState s;
    s.q << uniform(eng, -5, 5), uniform(eng, -5, 5), uniform(eng, 0, 10),
        uniform(eng, -0.5, 0.5), uniform(eng, -0.5, 0.5),
        uniform(eng, -0.5, 0.5);
    s.qdot << uniform(eng, -2, 2), uniform(eng, -2, 2), uniform(eng, -2, 2),
        uniform(eng, -1, 1), uniform(eng, -1, 1), uniform(eng, -1, 1);

    Vec8 tau0;
    for (int k = 0; k < 4; ++k) {
      const double pair = uniform(eng, 50.0, 400.0);
      tau0[2 * k] = pair;
      tau0[2 * k + 1] = pair;
    }
    const double fz = tau0.sum();
    const Mat38 b_bar = effective_input_matrix(s, cfg.vehicle, cfg.load);
    const AllocationResult res =
        thrust_allocation(b_bar * tau0, fz, b_bar);
    max_resid = std::max(max_resid, res.residual);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      max_pair = std::max(max_pair,
                          std::abs(res.thrust[2 * k] - res.thrust[2 * k + 1]));
    }
    for (int k = 0; k < 8; ++k) total += res.thrust[k];
    max_sum = std::max(max_sum, std::abs(total - fz));
  }
  const bool kkt_ok = max_resid <= 1e-9 && max_pair <= 1e-12 && max_sum <= 1e-12;
  std::cout << (kkt_ok ? "[PASS] " : "[FAIL] ")
            << "constrained allocation: max residual = " << max_resid
            << ", max pair mismatch = " << max_pair
            << ", max total mismatch = " << max_sum << "\n";

  return (rt_ok && kkt_ok) ? 0 : 1;
}

int cmd_metrics(const std::string& log_path, const std::string& config_path) {
  const ExperimentConfig cfg =
      config_path.empty() ? default_config() : read_config(config_path);
  const TrajectoryLog log = read_log(log_path);
  std::cout << metrics_to_json(compute_metrics(log, cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled octocopter + slung-load simulation and control"};
  app.require_subcommand(1);

  std::string config_path, out, log_path, metrics_config;
  bool no_noise = false, true_params = false;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_value = 0;

  CLI::App* run = app.add_subcommand(
      "run", "Run the closed-loop experiment and print metrics as JSON");
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_value, "Override the config RNG seed");
  run->add_flag("--no-noise", no_noise, "Zero all measurement-noise draws");
  run->add_flag("--true-params", true_params,
                "Feed the controller the true state and load");
  run->add_option("--out", out, "Write the per-step CSV log here");

  CLI::App* care = app.add_subcommand(
      "care-check", "Solve both gain-synthesis problems and report bounds");
  care->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();

  CLI::App* alloc = app.add_subcommand(
      "alloc-check", "Randomized attitude/thrust allocation exactness checks");
  alloc->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();

  CLI::App* metrics = app.add_subcommand(
      "metrics", "Recompute summary metrics from a stored CSV log");
  metrics->add_option("--log", log_path, "CSV log path")->required();
  metrics->add_option("--config", metrics_config,
                      "Config the log was produced with (built-in default "
                      "when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_run(config_path, no_noise, true_params, seed, out);
    }
    if (care->parsed()) return cmd_care_check(config_path);
    if (alloc->parsed()) return cmd_alloc_check(config_path);
    if (metrics->parsed()) return cmd_metrics(log_path, metrics_config);
  } catch (const octoload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
