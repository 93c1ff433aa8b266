#include "octoload/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace octoload {

namespace {

constexpr double kLyapTolerance = 1e-6;

const char* kHeader =
    "t,q_x,q_y,q_z,q_phi,q_theta,q_psi,"
    "qd_x,qd_y,qd_z,qd_phi,qd_theta,qd_psi,"
    "y_px,y_py,y_pz,y_phi,y_theta,y_psi,y_wx,y_wy,y_wz,"
    "xh_x,xh_y,xh_z,xh_phi,xh_theta,xh_psi,"
    "xh_vx,xh_vy,xh_vz,xh_wphi,xh_wtheta,xh_wpsi,"
    "dh_x,dh_y,ph_mL,ph_rL,"
    "tau_1,tau_2,tau_3,tau_4,tau_5,tau_6,tau_7,tau_8,"
    "f_z,phi_r,theta_r,V_c,V_r,alloc_residual,alloc_residual_xy";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_fields(std::string& line, const double* data, int n) {
  for (int i = 0; i < n; ++i) {
    line += ',';
    line += fmt(data[i]);
  }
}

}  // namespace

GeneralizedState integrate_truth(const GeneralizedState& s,
                                 const GeneralizedForces& f,
                                 const VehicleParams& veh,
                                 const LoadParams& load, double dt) {
  const Vec6 qddot = forward_dynamics(s, f, veh, load);
  GeneralizedState next;
  next.q = s.q + dt * s.qdot;
  next.qdot = s.qdot + dt * qddot;
  return next;
}

Vec9 simulate_measurement(const GeneralizedState& s, const Vec9& stddev,
                          MeasurementNoise* noise) {
  Vec16 mu = Vec16::Zero();
  mu.head<6>() = s.q;
  mu.segment<6>(6) = s.qdot;
  Vec9 y = measurement_model(mu);
  if (noise != nullptr) y += noise->draw(stddev);
  return y;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();

  const double dt = cfg.run.dt;
  const auto steps = static_cast<std::size_t>(
      std::llround(cfg.run.horizon / dt));
  const std::uint64_t seed = opt.seed.value_or(cfg.run.seed);

  MeasurementNoise noise(seed);
  MeasurementNoise* noise_ptr = opt.no_noise ? nullptr : &noise;
  const Vec9 stddev = cfg.estimator.meas_var.cwiseSqrt();

  JointUkf filter(cfg.estimator.initial_belief(), cfg.estimator.noise(),
                  cfg.vehicle, dt);
  CascadeController ctrl(cfg.weights_translational, cfg.weights_rotational,
                         cfg.vehicle);

  GeneralizedState truth;
  truth.q = cfg.run.q0;
  truth.qdot = cfg.run.qdot0;

  RunResult res;
  res.log.rows.reserve(steps);
  Vec8 u_prev = Vec8::Zero();

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;

    const Vec9 y = simulate_measurement(truth, stddev, noise_ptr);
    const GaussianBelief& belief = filter.step(u_prev, y);

    GeneralizedState est;
    LoadParams load_est;
    if (opt.true_params) {
      est = truth;
      load_est = cfg.load;
    } else {
      est = state_of(belief.mean);
      load_est = load_of(belief.mean);
    }

    const ReferenceSample ref = cfg.reference.sample(t);
    ControlCommand cmd;
    try {
      cmd = ctrl.step(est, load_est, ref, dt);
    } catch (const AllocationDomainError& e) {
      throw AllocationDomainError("run aborted at step " + std::to_string(k) +
                                  " (t = " + fmt(t) + "): " + e.what());
    }

    LogRow row;
    row.t = t;
    row.q = truth.q;
    row.qdot = truth.qdot;
    row.y = y;
    row.xhat = belief.mean.head<12>();
    row.dhat = belief.mean.segment<2>(12);
    row.phat = belief.mean.segment<2>(14);
    row.tau = cmd.thrust;
    row.f_z = cmd.attitude.f_z;
    row.phi_r = cmd.attitude.phi_r;
    row.theta_r = cmd.attitude.theta_r;
    row.V_c = cmd.V_c;
    row.V_r = cmd.V_r;
    row.alloc_residual = cmd.alloc_residual;
    row.alloc_residual_xy = cmd.alloc_residual_xy;
    row.p_std = belief.cov.diagonal().segment<2>(14).cwiseSqrt();
    res.log.rows.push_back(row);

    GeneralizedForces f;
    f.thrust = cmd.thrust;
    f.external = cfg.disturbance.at(t);
    truth = integrate_truth(truth, f, cfg.vehicle, cfg.load, dt);
    u_prev = cmd.thrust;
  }

  res.final_state = truth;
  res.metrics = compute_metrics(res.log, cfg);
  if (!opt.out.empty()) write_log(res.log, opt.out);
  return res;
}

void write_log(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("log: cannot write " + path);
  out << kHeader << '\n';
  std::string line;
  for (const LogRow& r : log.rows) {
    line.clear();
    line += fmt(r.t);
    append_fields(line, r.q.data(), 6);
    append_fields(line, r.qdot.data(), 6);
    append_fields(line, r.y.data(), 9);
    append_fields(line, r.xhat.data(), 12);
    append_fields(line, r.dhat.data(), 2);
    append_fields(line, r.phat.data(), 2);
    append_fields(line, r.tau.data(), 8);
    const double tail[7] = {r.f_z, r.phi_r, r.theta_r,
                            r.V_c, r.V_r, r.alloc_residual,
                            r.alloc_residual_xy};
    append_fields(line, tail, 7);
    out << line << '\n';
  }
}

TrajectoryLog read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("log: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error("log: empty file " + path);
  if (header != kHeader) throw Error("log: unexpected header in " + path);

  TrajectoryLog log;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[53];
    int n = 0;
    const char* p = line.c_str();
    char* end = nullptr;
    while (n < 53) {
      v[n] = std::strtod(p, &end);
      if (end == p) break;
      ++n;
      p = end;
      if (*p == ',') ++p;
      else break;
    }
    if (n != 53) {
      throw Error("log: malformed row at line " + std::to_string(lineno) +
                  " in " + path);
    }
    LogRow r;
    int i = 0;
    r.t = v[i++];
    for (int k = 0; k < 6; ++k) r.q[k] = v[i++];
    for (int k = 0; k < 6; ++k) r.qdot[k] = v[i++];
    for (int k = 0; k < 9; ++k) r.y[k] = v[i++];
    for (int k = 0; k < 12; ++k) r.xhat[k] = v[i++];
    for (int k = 0; k < 2; ++k) r.dhat[k] = v[i++];
    for (int k = 0; k < 2; ++k) r.phat[k] = v[i++];
    for (int k = 0; k < 8; ++k) r.tau[k] = v[i++];
    r.f_z = v[i++];
    r.phi_r = v[i++];
    r.theta_r = v[i++];
    r.V_c = v[i++];
    r.V_r = v[i++];
    r.alloc_residual = v[i++];
    r.alloc_residual_xy = v[i++];
    log.rows.push_back(r);
  }
  return log;
}

MetricsReport compute_metrics(const TrajectoryLog& log,
                              const ExperimentConfig& cfg) {
  MetricsReport m;
  m.steps = log.rows.size();
  if (log.rows.empty()) return m;

  const double horizon = cfg.run.horizon;
  const double rmse_start = std::max(0.0, horizon - cfg.reference.period);
  Vec3 sq = Vec3::Zero();
  std::size_t rmse_n = 0;

  const double settle_start = 0.75 * horizon;
  bool settled_any = false;

  double prev_vc = 0.0;
  bool have_prev = false;

  // Disturbance-tracking windows from the first x/y window, if any.
  bool have_dist = false;
  int dist_ch = 0;
  double dist_mag = 0.0, dist_a = 0.0, dist_b = 0.0, quiet_a = 0.0,
         quiet_b = 0.0;
  for (const DisturbanceWindow& w : cfg.disturbance.windows) {
    if (w.channel <= 1) {
      have_dist = true;
      dist_ch = w.channel;
      dist_mag = w.magnitude;
      dist_a = w.t_start + 3.0;  // skip the onset transient
      dist_b = w.t_end;
      quiet_a = w.t_end + 10.0;
      quiet_b = std::min(horizon, w.t_end + 30.0);
      break;
    }
  }
  double dist_sum = 0.0, quiet_sum = 0.0;
  std::size_t dist_n = 0, quiet_n = 0;

  for (const LogRow& r : log.rows) {
    if (r.t >= rmse_start) {
      const Vec3 err = r.q.head<3>() - cfg.reference.sample(r.t).pos;
      sq += err.cwiseProduct(err);
      ++rmse_n;
    }
    if (r.t >= settle_start) {
      if (!settled_any) {
        m.mhat_min_settled = m.mhat_max_settled = r.phat[0];
        m.rhat_min_settled = m.rhat_max_settled = r.phat[1];
        settled_any = true;
      } else {
        m.mhat_min_settled = std::min(m.mhat_min_settled, r.phat[0]);
        m.mhat_max_settled = std::max(m.mhat_max_settled, r.phat[0]);
        m.rhat_min_settled = std::min(m.rhat_min_settled, r.phat[1]);
        m.rhat_max_settled = std::max(m.rhat_max_settled, r.phat[1]);
      }
    }
    if (have_prev) {
      const double inc = r.V_c - prev_vc;
      if (inc > kLyapTolerance) ++m.lyap_violations;
      m.lyap_max_increase = std::max(m.lyap_max_increase, inc);
    }
    prev_vc = r.V_c;
    have_prev = true;

    if (have_dist) {
      if (r.t >= dist_a && r.t < dist_b) {
        dist_sum += std::abs(r.dhat[dist_ch] - dist_mag);
        ++dist_n;
      }
      if (r.t >= quiet_a && r.t < quiet_b) {
        quiet_sum += std::abs(r.dhat[dist_ch]);
        ++quiet_n;
      }
    }

    m.max_alloc_residual = std::max(m.max_alloc_residual, r.alloc_residual);
    m.max_alloc_residual_xy =
        std::max(m.max_alloc_residual_xy, r.alloc_residual_xy);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      m.max_pair_residual = std::max(
          m.max_pair_residual, std::abs(r.tau[2 * k] - r.tau[2 * k + 1]));
    }
    for (int k = 0; k < 8; ++k) {
      total += r.tau[k];
      if (r.tau[k] < 0.0) ++m.negative_thrusts;
    }
    m.max_sum_residual =
        std::max(m.max_sum_residual, std::abs(total - r.f_z));
  }

  if (rmse_n > 0) {
    m.rmse = (sq / static_cast<double>(rmse_n)).cwiseSqrt();
  }
  const LogRow& last = log.rows.back();
  m.terminal_error =
      (last.q.head<3>() - cfg.reference.sample(last.t).pos).cwiseAbs();
  m.mhat_terminal = last.phat[0];
  m.rhat_terminal = last.phat[1];
  if (dist_n > 0) m.dist_mean_err = dist_sum / static_cast<double>(dist_n);
  if (quiet_n > 0) m.quiet_mean_abs = quiet_sum / static_cast<double>(quiet_n);
  return m;
}

std::string metrics_to_json(const MetricsReport& m) {
  nlohmann::json j{
      {"steps", m.steps},
      {"rmse", {m.rmse[0], m.rmse[1], m.rmse[2]}},
      {"terminal_error",
       {m.terminal_error[0], m.terminal_error[1], m.terminal_error[2]}},
      {"mhat_terminal", m.mhat_terminal},
      {"rhat_terminal", m.rhat_terminal},
      {"mhat_settled_range", {m.mhat_min_settled, m.mhat_max_settled}},
      {"rhat_settled_range", {m.rhat_min_settled, m.rhat_max_settled}},
      {"dist_mean_err", m.dist_mean_err},
      {"quiet_mean_abs", m.quiet_mean_abs},
      {"lyap_violations", m.lyap_violations},
      {"lyap_max_increase", m.lyap_max_increase},
      {"max_alloc_residual", m.max_alloc_residual},
      {"max_alloc_residual_xy", m.max_alloc_residual_xy},
      {"max_pair_residual", m.max_pair_residual},
      {"max_sum_residual", m.max_sum_residual},
      {"negative_thrusts", m.negative_thrusts}};
  return j.dump(2) + "\n";
}

}  // namespace octoload
