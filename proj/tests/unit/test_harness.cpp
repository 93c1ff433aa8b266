#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "octoload/config.hpp"
#include "octoload/kinematics.hpp"
#include "octoload/multibody.hpp"
#include "octoload/reference.hpp"
#include "octoload/rng.hpp"
#include "octoload/sim.hpp"
#include "support.hpp"

using namespace octoload;
using octoload::testing::Rng;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kExpectedHeader =
    "t,q_x,q_y,q_z,q_phi,q_theta,q_psi,"
    "qd_x,qd_y,qd_z,qd_phi,qd_theta,qd_psi,"
    "y_px,y_py,y_pz,y_phi,y_theta,y_psi,y_wx,y_wy,y_wz,"
    "xh_x,xh_y,xh_z,xh_phi,xh_theta,xh_psi,"
    "xh_vx,xh_vy,xh_vz,xh_wphi,xh_wtheta,xh_wpsi,"
    "dh_x,dh_y,ph_mL,ph_rL,"
    "tau_1,tau_2,tau_3,tau_4,tau_5,tau_6,tau_7,tau_8,"
    "f_z,phi_r,theta_r,V_c,V_r,alloc_residual,alloc_residual_xy";

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("reference derivatives are the derivatives of the position") {
    ReferenceTrajectory ref;  // benchmark circle + vertical cosine
    const double h = 1e-5;
    for (double t = 0.0; t <= 85.0; t += 7.3) {
      const ReferenceSample mid = ref.sample(t);
      const ReferenceSample lo = ref.sample(t - h);
      const ReferenceSample hi = ref.sample(t + h);
      const Vec3 vel_fd = (hi.pos - lo.pos) / (2.0 * h);
      const Vec3 acc_fd = (hi.vel - lo.vel) / (2.0 * h);
      CHECK((mid.vel - vel_fd).norm() < 1e-6);
      CHECK((mid.acc - acc_fd).norm() < 1e-6);
    }
  }

  TEST_CASE("reference traces the documented closed curve") {
    ReferenceTrajectory ref;
    const ReferenceSample s0 = ref.sample(0.0);
    CHECK((s0.pos - Vec3(2.0, 0.0, 1.0)).norm() < 1e-14);
    const double w = 2.0 * M_PI / 40.0;
    CHECK(s0.vel[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(s0.vel[1] == doctest::Approx(2.0 * w).epsilon(1e-12));
    CHECK(s0.acc[0] == doctest::Approx(-2.0 * w * w).epsilon(1e-12));
    CHECK(s0.acc[2] == doctest::Approx(8.0 * w * w).epsilon(1e-12));

    // One full period closes the curve.
    for (double t = 0.0; t < 40.0; t += 3.7) {
      const ReferenceSample a = ref.sample(t);
      const ReferenceSample b = ref.sample(t + 40.0);
      CHECK((a.pos - b.pos).norm() < 1e-9);
      CHECK((a.vel - b.vel).norm() < 1e-9);
      CHECK((a.acc - b.acc).norm() < 1e-9);
    }

    ReferenceTrajectory turned = ref;
    turned.psi = 0.3;
    const ReferenceSample st = turned.sample(12.0);
    CHECK(st.psi == 0.3);
    CHECK(st.psi_dot == 0.0);
    CHECK(st.psi_ddot == 0.0);
  }

  TEST_CASE("disturbance windows are half-open and additive") {
    DisturbanceProfile prof;
    prof.windows = {DisturbanceWindow{0, 10.0, 5.0, 15.0},
                    DisturbanceWindow{0, 5.0, 10.0, 20.0},
                    DisturbanceWindow{3, 2.0, 0.0, 100.0}};

    CHECK(prof.at(4.9999)[0] == 0.0);
    CHECK(prof.at(5.0)[0] == 10.0);   // closed at the left edge
    CHECK(prof.at(12.0)[0] == 15.0);  // overlap adds
    CHECK(prof.at(15.0)[0] == 5.0);   // open at the right edge
    CHECK(prof.at(20.0)[0] == 0.0);
    CHECK(prof.at(12.0)[3] == 2.0);
    CHECK(prof.at(12.0)[1] == 0.0);
    CHECK(prof.at(12.0).tail<2>().norm() == 0.0);

    DisturbanceProfile empty;
    CHECK(empty.at(1.0).norm() == 0.0);
  }

  TEST_CASE("truth integrator is one explicit euler step") {
    Rng rng(70);
    const ExperimentConfig cfg = default_config();
    for (int i = 0; i < 20; ++i) {
      const GeneralizedState s = octoload::testing::random_state(rng, 0.6, 1.0);
      GeneralizedForces f;
      for (int p = 0; p < 8; ++p) {
        f.thrust[p] = rng.uniform(0.0, 300.0);
      }
      f.external << rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0), 0.0,
          0.0, 0.0, 0.0;
      const double dt = 0.01;
      const GeneralizedState next =
          integrate_truth(s, f, cfg.vehicle, cfg.load, dt);
      const Vec6 qddot = forward_dynamics(s, f, cfg.vehicle, cfg.load);
      CHECK((next.q - (s.q + dt * s.qdot)).norm() < 1e-13);
      CHECK((next.qdot - (s.qdot + dt * qddot)).norm() <
            1e-10 * (1.0 + qddot.norm()));
    }
  }

  TEST_CASE("noise-free measurement equals the sensor map") {
    Rng rng(71);
    for (int i = 0; i < 20; ++i) {
      const GeneralizedState s = octoload::testing::random_state(rng, 0.9, 2.0);
      const Vec9 y = simulate_measurement(s, Vec9::Ones(), nullptr);
      CHECK((y.head<3>() - s.xi()).norm() == 0.0);
      CHECK((y.segment<3>(3) - s.eta()).norm() == 0.0);
      const Vec3 omega = euler_rate_matrix(s.eta()) * s.etadot();
      CHECK((y.tail<3>() - omega).norm() == 0.0);
    }
  }

  TEST_CASE("measurement noise is seeded, scaled and reproducible") {
    // Reference first output of the seed-mixing function for input zero.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);

    GaussianStream g1(7);
    GaussianStream g2(7);
    for (int i = 0; i < 100; ++i) {
      CHECK(g1.draw() == g2.draw());
    }

    // Moments of the stream over a modest sample.
    GaussianStream g(123);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double x = g.draw();
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);

    // Scaling by the per-channel standard deviation is exact.
    MeasurementNoise n1(42);
    MeasurementNoise n2(42);
    MeasurementNoise n3(43);
    const Vec9 a = n1.draw(Vec9::Ones());
    const Vec9 b = n2.draw(Vec9::Constant(2.0));
    const Vec9 c = n3.draw(Vec9::Ones());
    CHECK((b - 2.0 * a).norm() == 0.0);
    CHECK((c - a).norm() > 0.0);

    // A noisy measurement is the clean map plus the scaled draws.
    GeneralizedState s;
    s.q << 1.0, 2.0, 3.0, 0.1, -0.2, 0.3;
    s.qdot << 0.5, -0.5, 0.25, 0.02, 0.03, -0.04;
    MeasurementNoise n4(42);
    const Vec9 stddev = Vec9::Constant(0.1);
    const Vec9 noisy = simulate_measurement(s, stddev, &n4);
    const Vec9 clean = simulate_measurement(s, stddev, nullptr);
    MeasurementNoise n5(42);
    CHECK((noisy - (clean + n5.draw(stddev))).norm() == 0.0);
  }

  TEST_CASE("log header is frozen and rows round trip bit for bit") {
    TrajectoryLog log;
    Rng rng(72);
    for (int i = 0; i < 25; ++i) {
      LogRow r;
      r.t = 0.01 * i;
      for (int k = 0; k < 6; ++k) {
        r.q[k] = rng.uniform(-10.0, 10.0);
        r.qdot[k] = rng.uniform(-5.0, 5.0);
      }
      for (int k = 0; k < 9; ++k) {
        r.y[k] = rng.uniform(-4.0, 4.0);
      }
      for (int k = 0; k < 12; ++k) {
        r.xhat[k] = rng.uniform(-4.0, 4.0);
      }
      r.dhat << rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0);
      r.phat << rng.uniform(0.0, 120.0), rng.uniform(0.0, 1.0);
      for (int k = 0; k < 8; ++k) {
        r.tau[k] = rng.uniform(-10.0, 400.0);
      }
      r.f_z = rng.uniform(0.0, 2500.0);
      r.phi_r = rng.uniform(-0.5, 0.5);
      r.theta_r = rng.uniform(-0.5, 0.5);
      r.V_c = rng.uniform(0.0, 100.0);
      r.V_r = rng.uniform(0.0, 100.0);
      r.alloc_residual = rng.uniform(0.0, 10.0);
      r.alloc_residual_xy = rng.uniform(0.0, 1e-9);
      log.rows.push_back(r);
    }
    // Values that stress the formatter.
    log.rows[0].q[0] = 1.0 / 3.0;
    log.rows[0].q[1] = M_PI;
    log.rows[0].q[2] = 1e-300;
    log.rows[0].q[3] = -1e300;
    log.rows[0].q[4] = 5e-324;  // smallest subnormal
    log.rows[0].q[5] = 0.0;

    const std::string path = "test_harness_roundtrip.csv";
    write_log(log, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == kExpectedHeader);
    in.close();

    const TrajectoryLog back = read_log(path);
    REQUIRE(back.rows.size() == log.rows.size());
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
      const LogRow& a = log.rows[i];
      const LogRow& b = back.rows[i];
      CHECK(a.t == b.t);
      CHECK((a.q - b.q).norm() == 0.0);
      CHECK((a.qdot - b.qdot).norm() == 0.0);
      CHECK((a.y - b.y).norm() == 0.0);
      CHECK((a.xhat - b.xhat).norm() == 0.0);
      CHECK((a.dhat - b.dhat).norm() == 0.0);
      CHECK((a.phat - b.phat).norm() == 0.0);
      CHECK((a.tau - b.tau).norm() == 0.0);
      CHECK(a.f_z == b.f_z);
      CHECK(a.phi_r == b.phi_r);
      CHECK(a.theta_r == b.theta_r);
      CHECK(a.V_c == b.V_c);
      CHECK(a.V_r == b.V_r);
      CHECK(a.alloc_residual == b.alloc_residual);
      CHECK(a.alloc_residual_xy == b.alloc_residual_xy);
    }
    std::remove(path.c_str());
  }

  TEST_CASE("log reader rejects damaged files") {
    CHECK_THROWS_WITH_AS((void)read_log("no_such_log.csv"),
                         doctest::Contains("cannot open"), Error);

    const std::string bad_header = "test_harness_badheader.csv";
    {
      std::ofstream out(bad_header);
      out << "time,stuff\n1,2\n";
    }
    CHECK_THROWS_WITH_AS((void)read_log(bad_header),
                         doctest::Contains("unexpected header"), Error);
    std::remove(bad_header.c_str());

    const std::string bad_row = "test_harness_badrow.csv";
    {
      std::ofstream out(bad_row);
      out << kExpectedHeader << "\n1,2,3\n";
    }
    CHECK_THROWS_WITH_AS((void)read_log(bad_row),
                         doctest::Contains("malformed row"), Error);
    std::remove(bad_row.c_str());
  }

  TEST_CASE("metrics summarize a hand-built log exactly") {
    ExperimentConfig cfg = default_config();
    cfg.run.dt = 1.0;
    cfg.run.horizon = 80.0;  // settle at 60, error window [40, 80]

    const Vec3 offset(0.1, -0.2, 0.05);
    TrajectoryLog log;
    for (int i = 0; i < 80; ++i) {
      LogRow r;
      r.t = static_cast<double>(i);
      r.q.head<3>() = cfg.reference.sample(r.t).pos + offset;

      r.V_c = 1.0;
      if (i == 50) r.V_c = 2.0;            // one real increase
      if (i == 55) r.V_c = 1.0 + 5e-7;     // below the tolerance

      if (r.t >= 20.0 && r.t < 30.0) r.dhat[0] = 31.0;
      if (r.t >= 40.0) r.dhat[0] = 0.5;

      if (r.t >= 70.0) {
        r.phat << 105.0, 0.55;
      } else if (r.t >= 60.0) {
        r.phat << 95.0, 0.45;
      } else {
        r.phat << 50.0, 0.75;
      }

      r.tau.setConstant(2.0);
      r.f_z = 16.0;
      if (i == 10) {
        r.tau[0] = 2.001;  // pair mismatch
        r.f_z = 16.001;
      }
      if (i == 11) r.f_z = 15.75;  // collective mismatch
      if (i == 12) {
        r.tau[4] = r.tau[5] = -0.5;  // two negative rotors
        r.f_z = 11.0;
      }
      if (i == 13) {
        r.tau[2] = r.tau[3] = -0.25;  // two more
        r.f_z = 11.5;
      }

      r.alloc_residual = (i == 33) ? 0.7 : 0.1;
      r.alloc_residual_xy = (i == 44) ? 5e-12 : 1e-13;
      log.rows.push_back(r);
    }

    const MetricsReport m = compute_metrics(log, cfg);
    CHECK(m.steps == 80);
    CHECK((m.rmse - Vec3(0.1, 0.2, 0.05)).norm() < 1e-12);
    CHECK((m.terminal_error - Vec3(0.1, 0.2, 0.05)).norm() < 1e-12);
    CHECK(m.mhat_terminal == 105.0);
    CHECK(m.rhat_terminal == 0.55);
    CHECK(m.mhat_min_settled == 95.0);
    CHECK(m.mhat_max_settled == 105.0);
    CHECK(m.rhat_min_settled == 0.45);
    CHECK(m.rhat_max_settled == 0.55);
    CHECK(m.dist_mean_err == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.quiet_mean_abs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.lyap_violations == 1);
    CHECK(m.lyap_max_increase == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.max_pair_residual == doctest::Approx(0.001).epsilon(1e-9));
    CHECK(m.max_sum_residual == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.negative_thrusts == 4);
    CHECK(m.max_alloc_residual == 0.7);
    CHECK(m.max_alloc_residual_xy == 5e-12);

    const std::string js = metrics_to_json(m);
    CHECK(js.find("\"lyap_violations\": 1") != std::string::npos);
    CHECK(js.find("\"negative_thrusts\": 4") != std::string::npos);
  }

  TEST_CASE("identical configs and seeds give byte-identical logs") {
    ExperimentConfig cfg = default_config();
    cfg.run.horizon = 2.0;  // short closed-loop run, full noise path

    RunOptions opt;
    opt.out = "test_harness_det_a.csv";
    const RunResult r1 = run_experiment(cfg, opt);
    opt.out = "test_harness_det_b.csv";
    const RunResult r2 = run_experiment(cfg, opt);

    const std::string a = slurp("test_harness_det_a.csv");
    const std::string b = slurp("test_harness_det_b.csv");
    CHECK(a.size() > 0);
    CHECK(a == b);
    CHECK(r1.log.rows.size() == r2.log.rows.size());
    CHECK((r1.final_state.q - r2.final_state.q).norm() == 0.0);
    CHECK((r1.final_state.qdot - r2.final_state.qdot).norm() == 0.0);

    // A different seed must change the noise stream and therefore the log.
    RunOptions other;
    other.seed = 999;
    other.out = "test_harness_det_c.csv";
    (void)run_experiment(cfg, other);
    const std::string c = slurp("test_harness_det_c.csv");
    CHECK(a != c);

    std::remove("test_harness_det_a.csv");
    std::remove("test_harness_det_b.csv");
    std::remove("test_harness_det_c.csv");
  }
}
