#include "octoload/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace octoload {

namespace {

using nlohmann::json;

// Path-tracking accessor so every parse error names the offending field.
class Cursor {
 public:
  Cursor(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  Cursor child(const std::string& key) const {
    const json& here = *j_;
    if (!here.is_object() || !here.contains(key)) {
      throw ConfigError("config: missing field " + join(key));
    }
    return Cursor(here.at(key), join(key));
  }

  bool has(const std::string& key) const {
    return j_->is_object() && j_->contains(key);
  }

  double num(const std::string& key) const {
    const Cursor c = child(key);
    if (!c.j_->is_number()) {
      throw ConfigError("config: field " + c.path_ + " must be a number");
    }
    return c.j_->get<double>();
  }

  std::uint64_t uint(const std::string& key) const {
    const Cursor c = child(key);
    if (!c.j_->is_number_unsigned() && !c.j_->is_number_integer()) {
      throw ConfigError("config: field " + c.path_ +
                        " must be a non-negative integer");
    }
    const auto v = c.j_->get<std::int64_t>();
    if (v < 0) {
      throw ConfigError("config: field " + c.path_ +
                        " must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const std::string& key) const {
    const Cursor c = child(key);
    if (!c.j_->is_array() || c.j_->size() != static_cast<std::size_t>(N)) {
      throw ConfigError("config: field " + c.path_ + " must be an array of " +
                        std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      const json& e = c.j_->at(static_cast<std::size_t>(i));
      if (!e.is_number()) {
        throw ConfigError("config: field " + c.path_ + "[" +
                          std::to_string(i) + "] must be a number");
      }
      out[i] = e.get<double>();
    }
    return out;
  }

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

 private:
  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* j_;
  std::string path_;
};

json vec_to_json(const Eigen::Ref<const VecX>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

WeightSet weights_from(const Cursor& c) {
  WeightSet w;
  w.Y0 = c.vec<3>("Y0");
  w.Y1 = c.vec<3>("Y1");
  w.Y2 = c.vec<3>("Y2");
  w.Y3 = c.vec<3>("Y3");
  return w;
}

json weights_to_json(const WeightSet& w) {
  return json{{"Y0", vec_to_json(w.Y0)},
              {"Y1", vec_to_json(w.Y1)},
              {"Y2", vec_to_json(w.Y2)},
              {"Y3", vec_to_json(w.Y3)}};
}

}  // namespace

NoiseConfig EstimatorSettings::noise() const {
  NoiseConfig n;
  n.process_cov = process_var.asDiagonal();
  n.meas_cov = meas_var.asDiagonal();
  return n;
}

GaussianBelief EstimatorSettings::initial_belief() const {
  GaussianBelief b;
  b.mean.head<12>() = x0;
  b.mean.segment<2>(12) = d0;
  b.mean.segment<2>(14) = p0;
  Vec16 var;
  var << x0_var, d0_var, p0_var;
  b.cov = var.asDiagonal();
  return b;
}

void ExperimentConfig::validate() const {
  vehicle.validate();
  weights_translational.validate();
  weights_rotational.validate();
  if (load.m_L < 0.0) throw ConfigError("load.m_L must be non-negative");
  if (load.r_L < 0.0) throw ConfigError("load.r_L must be non-negative");
  if (!(run.dt > 0.0)) throw ConfigError("run.dt must be positive");
  if (run.horizon < 0.0) throw ConfigError("run.horizon must be non-negative");
  if (!(reference.period > 0.0)) {
    throw ConfigError("reference.period must be positive");
  }
  for (std::size_t i = 0; i < disturbance.windows.size(); ++i) {
    const DisturbanceWindow& w = disturbance.windows[i];
    const std::string where = "disturbance[" + std::to_string(i) + "]";
    if (w.channel < 0 || w.channel > 5) {
      throw ConfigError(where + ".channel must be in 0..5");
    }
    if (w.t_end < w.t_start) {
      throw ConfigError(where + ".t_end must be >= t_start");
    }
  }
  for (int i = 0; i < 16; ++i) {
    if (estimator.process_var[i] < 0.0) {
      throw ConfigError("estimator.process_var must be non-negative");
    }
  }
  for (int i = 0; i < 9; ++i) {
    if (estimator.meas_var[i] < 0.0) {
      throw ConfigError("estimator.meas_var must be non-negative");
    }
  }
}

ExperimentConfig default_config() {
  using std::numbers::pi;
  ExperimentConfig c;

  c.vehicle.m_O = 53.09;
  c.vehicle.I_O = Vec3(18.78, 19.76, 37.87).asDiagonal();
  c.vehicle.r_O = Vec3::Zero();
  c.vehicle.prop_pos = {Vec3(1.1, 1.1, 0.12),   Vec3(1.1, 1.1, -0.17),
                        Vec3(-1.1, 1.1, 0.12),  Vec3(-1.1, 1.1, -0.17),
                        Vec3(-1.1, -1.1, 0.12), Vec3(-1.1, -1.1, -0.17),
                        Vec3(1.1, -1.1, 0.12),  Vec3(1.1, -1.1, -0.17)};
  c.vehicle.spin_dir = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
  c.vehicle.b = 2.85e-5;
  c.vehicle.k_tau = 1.42e-6;
  c.vehicle.k_b = c.vehicle.k_tau / c.vehicle.b;
  c.vehicle.g = -9.81;
  c.vehicle.delta_L = 0.2;
  c.vehicle.varsigma = -1.0;

  c.load.m_L = 100.0;
  c.load.r_L = 0.5;

  c.weights_translational.Y0 = Vec3(5.0, 5.0, 10.0);
  c.weights_translational.Y1 = Vec3(10.0, 10.0, 50.0);
  c.weights_translational.Y2 = Vec3(1.0, 1.0, 1.0);
  c.weights_translational.Y3 = Vec3(6.0, 6.0, 1.0);

  c.weights_rotational.Y0 = Vec3(1.0, 1.0, 1.0);
  c.weights_rotational.Y1 = Vec3(10.0, 10.0, 10.0);
  c.weights_rotational.Y2 = Vec3(0.2, 0.2, 0.2);
  c.weights_rotational.Y3 = Vec3(0.05, 0.05, 0.05);

  c.estimator.x0 << 2.4, 0.5, -0.2, pi / 6.0, pi / 6.0, 0.0, 0.0, 0.0, 0.0,
      0.0, 0.0, 0.0;
  c.estimator.d0 << 0.0, 0.0;
  c.estimator.p0 << 50.0, 0.75;

  const double pos0 = (2.0 / 3.0) * (2.0 / 3.0);
  const double tilt0 = (pi / 18.0) * (pi / 18.0);
  const double yaw0 = (pi / 6.0) * (pi / 6.0);
  const double vel0 = 1.0 / 3.0;
  const double rate0 = (pi / 36.0) * (pi / 36.0);
  c.estimator.x0_var << pos0, pos0, pos0, tilt0, tilt0, yaw0, vel0, vel0, vel0,
      rate0, rate0, rate0;
  c.estimator.d0_var << (1.0 / 3.0) * (1.0 / 3.0), (1.0 / 3.0) * (1.0 / 3.0);
  c.estimator.p0_var << (50.0 / 3.0) * (50.0 / 3.0),
      (0.75 / 3.0) * (0.75 / 3.0);

  const double walk_x = (0.01 / 3.0) * (0.01 / 3.0);
  const double walk_d = (1.0 / 3.0) * (1.0 / 3.0);
  Vec16 pv;
  pv.setConstant(walk_x);
  pv[12] = walk_d;
  pv[13] = walk_d;
  pv[14] = (2.0 / 3.0) * (2.0 / 3.0);
  pv[15] = (0.001 / 3.0) * (0.001 / 3.0);
  c.estimator.process_var = pv;

  const double ang = 0.05 * pi / 180.0;
  c.estimator.meas_var << 0.05 * 0.05, 0.05 * 0.05, 0.17 * 0.17, ang * ang,
      ang * ang, ang * ang, 0.00552 * 0.00552, 0.00552 * 0.00552,
      0.00552 * 0.00552;

  c.reference = ReferenceTrajectory{};  // 2 m circle, 9 -+ 8 m climb, 40 s

  c.disturbance.windows = {DisturbanceWindow{0, 30.0, 20.0, 30.0}};

  c.run.dt = 0.01;
  c.run.horizon = 80.0;
  c.run.seed = 12345;
  c.run.q0 << 1.9, 0.0, 0.8, 0.0, 0.0, pi / 6.0;
  c.run.qdot0.setZero();
  return c;
}

ExperimentConfig ideal_config() {
  ExperimentConfig c = default_config();
  c.disturbance.windows.clear();
  return c;
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  const Cursor root(j, "");

  ExperimentConfig c;
  const Cursor veh = root.child("vehicle");
  c.vehicle.m_O = veh.num("m_O");
  c.vehicle.I_O = Mat3(veh.vec<3>("I_O").asDiagonal());
  c.vehicle.r_O = veh.vec<3>("r_O");
  {
    const Cursor pp = veh.child("prop_pos");
    if (!pp.raw().is_array() || pp.raw().size() != 8) {
      throw ConfigError("config: field vehicle.prop_pos must be an array of "
                        "8 triples");
    }
    for (std::size_t p = 0; p < 8; ++p) {
      const json& e = pp.raw().at(p);
      if (!e.is_array() || e.size() != 3 || !e.at(0).is_number() ||
          !e.at(1).is_number() || !e.at(2).is_number()) {
        throw ConfigError("config: field vehicle.prop_pos[" +
                          std::to_string(p) + "] must be a numeric triple");
      }
      c.vehicle.prop_pos[p] =
          Vec3(e.at(0).get<double>(), e.at(1).get<double>(),
               e.at(2).get<double>());
    }
  }
  const Vec8 spins = veh.vec<8>("spin_dir");
  for (int p = 0; p < 8; ++p) {
    c.vehicle.spin_dir[static_cast<std::size_t>(p)] = spins[p];
  }
  c.vehicle.b = veh.num("b");
  c.vehicle.k_tau = veh.num("k_tau");
  c.vehicle.k_b = veh.has("k_b") ? veh.num("k_b")
                                 : c.vehicle.k_tau / c.vehicle.b;
  c.vehicle.g = veh.num("g");
  c.vehicle.delta_L = veh.num("delta_L");
  c.vehicle.varsigma = veh.num("varsigma");

  const Cursor load = root.child("load");
  c.load.m_L = load.num("m_L");
  c.load.r_L = load.num("r_L");

  const Cursor ctrl = root.child("controller");
  c.weights_translational = weights_from(ctrl.child("translational"));
  c.weights_rotational = weights_from(ctrl.child("rotational"));

  const Cursor est = root.child("estimator");
  c.estimator.x0 = est.vec<12>("x0");
  c.estimator.d0 = est.vec<2>("d0");
  c.estimator.p0 = est.vec<2>("p0");
  c.estimator.x0_var = est.vec<12>("x0_var");
  c.estimator.d0_var = est.vec<2>("d0_var");
  c.estimator.p0_var = est.vec<2>("p0_var");
  c.estimator.process_var = est.vec<16>("process_var");
  c.estimator.meas_var = est.vec<9>("meas_var");

  const Cursor ref = root.child("reference");
  c.reference.amp_x = ref.num("amp_x");
  c.reference.amp_y = ref.num("amp_y");
  c.reference.z_offset = ref.num("z_offset");
  c.reference.amp_z = ref.num("amp_z");
  c.reference.period = ref.num("period");
  c.reference.psi = ref.num("psi");

  c.disturbance.windows.clear();
  const Cursor dist = root.child("disturbance");
  if (!dist.raw().is_array()) {
    throw ConfigError("config: field disturbance must be an array");
  }
  for (std::size_t i = 0; i < dist.raw().size(); ++i) {
    const Cursor w(dist.raw().at(i), "disturbance[" + std::to_string(i) + "]");
    DisturbanceWindow dw;
    dw.channel = static_cast<int>(w.num("channel"));
    dw.magnitude = w.num("magnitude");
    dw.t_start = w.num("t_start");
    dw.t_end = w.num("t_end");
    c.disturbance.windows.push_back(dw);
  }

  const Cursor run = root.child("run");
  c.run.dt = run.num("dt");
  c.run.horizon = run.num("horizon");
  c.run.seed = run.uint("seed");
  c.run.q0 = run.vec<6>("q0");
  c.run.qdot0 = run.vec<6>("qdot0");

  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json veh{{"m_O", c.vehicle.m_O},
           {"I_O", vec_to_json(c.vehicle.I_O.diagonal())},
           {"r_O", vec_to_json(c.vehicle.r_O)},
           {"b", c.vehicle.b},
           {"k_tau", c.vehicle.k_tau},
           {"k_b", c.vehicle.k_b},
           {"g", c.vehicle.g},
           {"delta_L", c.vehicle.delta_L},
           {"varsigma", c.vehicle.varsigma}};
  json pp = json::array();
  for (const Vec3& p : c.vehicle.prop_pos) pp.push_back(vec_to_json(p));
  veh["prop_pos"] = pp;
  json spins = json::array();
  for (double s : c.vehicle.spin_dir) spins.push_back(s);
  veh["spin_dir"] = spins;

  json dist = json::array();
  for (const DisturbanceWindow& w : c.disturbance.windows) {
    dist.push_back(json{{"channel", w.channel},
                        {"magnitude", w.magnitude},
                        {"t_start", w.t_start},
                        {"t_end", w.t_end}});
  }

  const json j{
      {"vehicle", veh},
      {"load", json{{"m_L", c.load.m_L}, {"r_L", c.load.r_L}}},
      {"controller",
       json{{"translational", weights_to_json(c.weights_translational)},
            {"rotational", weights_to_json(c.weights_rotational)}}},
      {"estimator",
       json{{"x0", vec_to_json(c.estimator.x0)},
            {"d0", vec_to_json(c.estimator.d0)},
            {"p0", vec_to_json(c.estimator.p0)},
            {"x0_var", vec_to_json(c.estimator.x0_var)},
            {"d0_var", vec_to_json(c.estimator.d0_var)},
            {"p0_var", vec_to_json(c.estimator.p0_var)},
            {"process_var", vec_to_json(c.estimator.process_var)},
            {"meas_var", vec_to_json(c.estimator.meas_var)}}},
      {"reference",
       json{{"amp_x", c.reference.amp_x},
            {"amp_y", c.reference.amp_y},
            {"z_offset", c.reference.z_offset},
            {"amp_z", c.reference.amp_z},
            {"period", c.reference.period},
            {"psi", c.reference.psi}}},
      {"disturbance", dist},
      {"run", json{{"dt", c.run.dt},
                   {"horizon", c.run.horizon},
                   {"seed", c.run.seed},
                   {"q0", vec_to_json(c.run.q0)},
                   {"qdot0", vec_to_json(c.run.qdot0)}}}};
  return j.dump(2) + "\n";
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void write_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path);
  out << config_to_json(cfg);
}

}  // namespace octoload
