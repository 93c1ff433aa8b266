#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "octoload/config.hpp"
#include "octoload/control.hpp"
#include "octoload/kinematics.hpp"
#include "octoload/multibody.hpp"
#include "octoload/sim.hpp"

namespace py = pybind11;
using namespace octoload;

namespace {

GeneralizedState make_state(const Vec6& q, const Vec6& qdot) {
  GeneralizedState s;
  s.q = q;
  s.qdot = qdot;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Coupled octocopter + slung-load dynamics, cascaded tracking control "
      "and joint state/parameter estimation";

  py::register_exception<Error>(m, "OctoloadError");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("default", &default_config,
                  "The shipped benchmark scenario")
      .def_static("ideal", &ideal_config,
                  "Benchmark scenario without the disturbance windows")
      .def_static("from_json", &config_from_json, py::arg("text"))
      .def_static("load", &read_config, py::arg("path"))
      .def("to_json", &config_to_json)
      .def("save", &write_config, py::arg("path"));

  m.def("skew", &skew, py::arg("v"));
  m.def("rotation_zyx", &rotation_zyx, py::arg("eta"));
  m.def("euler_rate_matrix", &euler_rate_matrix, py::arg("eta"));

  m.def(
      "mass_matrix",
      [](const Vec6& q, const Vec6& qdot, const ExperimentConfig& cfg,
         double m_L, double r_L) -> Mat6 {
        return mass_matrix(make_state(q, qdot), cfg.vehicle,
                           LoadParams{m_L, r_L});
      },
      py::arg("q"), py::arg("qdot"), py::arg("config"), py::arg("m_L"),
      py::arg("r_L"));
  m.def(
      "forward_dynamics",
      [](const Vec6& q, const Vec6& qdot, const Vec8& thrust,
         const Vec6& external, const ExperimentConfig& cfg, double m_L,
         double r_L) -> Vec6 {
        GeneralizedForces f;
        f.thrust = thrust;
        f.external = external;
        return forward_dynamics(make_state(q, qdot), f, cfg.vehicle,
                                LoadParams{m_L, r_L});
      },
      py::arg("q"), py::arg("qdot"), py::arg("thrust"), py::arg("external"),
      py::arg("config"), py::arg("m_L"), py::arg("r_L"));

  m.def(
      "solve_tracking_gains",
      [](const Vec3& y0, const Vec3& y1, const Vec3& y2, const Vec3& y3) {
        WeightSet w;
        w.Y0 = y0;
        w.Y1 = y1;
        w.Y2 = y2;
        w.Y3 = y3;
        const RiccatiSolution sol = solve_tracking_gains(w);
        return py::make_tuple(Mat9(sol.Q), sol.residual);
      },
      py::arg("Y0"), py::arg("Y1"), py::arg("Y2"), py::arg("Y3"),
      "Returns (Q, residual) of the stabilizing tracking-gain solution");

  m.def(
      "attitude_allocation",
      [](const Vec3& u_star, double phi, double theta) {
        const AttitudeCommand c = attitude_allocation(u_star, phi, theta);
        return py::make_tuple(c.f_z, c.phi_r, c.theta_r);
      },
      py::arg("u_star"), py::arg("phi"), py::arg("theta"),
      "Returns (f_z, phi_r, theta_r)");

  m.def(
      "effective_input_matrix",
      [](const Vec6& q, const Vec6& qdot, const ExperimentConfig& cfg,
         double m_L, double r_L) -> Mat38 {
        return effective_input_matrix(make_state(q, qdot), cfg.vehicle,
                                      LoadParams{m_L, r_L});
      },
      py::arg("q"), py::arg("qdot"), py::arg("config"), py::arg("m_L"),
      py::arg("r_L"),
      "3x8 map from rotor thrusts to the reduced attitude dynamics");
  m.def(
      "thrust_allocation",
      [](const Vec3& u_bar_star, double f_z, const Mat38& B_bar) {
        const AllocationResult r = thrust_allocation(u_bar_star, f_z, B_bar);
        return py::make_tuple(Vec8(r.thrust), r.residual, r.residual_xy,
                              r.negative_thrusts);
      },
      py::arg("u_bar_star"), py::arg("f_z"), py::arg("B_bar"),
      "Returns (thrust, residual, residual_xy, negative_thrusts)");

  m.def(
      "run_experiment",
      [](const ExperimentConfig& cfg, bool no_noise, bool true_params,
         std::optional<std::uint64_t> seed, const std::string& out) {
        RunOptions opt;
        opt.no_noise = no_noise;
        opt.true_params = true_params;
        opt.seed = seed;
        opt.out = out;
        const RunResult res = run_experiment(cfg, opt);
        return metrics_to_json(res.metrics);
      },
      py::arg("config"), py::arg("no_noise") = false,
      py::arg("true_params") = false, py::arg("seed") = std::nullopt,
      py::arg("out") = std::string(),
      "Runs the closed loop; returns the metrics report as a JSON string");
}
