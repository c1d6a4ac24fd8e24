#include "alc/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <string>

#include "alc/errors.hpp"

namespace alc {

namespace {

// Reads one section, applying `set(key, node)` per key and rejecting typos.
void read_section(const YAML::Node& root, const std::string& name,
                  const std::set<std::string>& known,
                  const std::function<void(const std::string&, const YAML::Node&)>& set) {
  const YAML::Node sec = root[name];
  if (!sec) return;
  if (!sec.IsMap()) throw ConfigError("scenario: section '" + name + "' must be a mapping");
  for (const auto& kv : sec) {
    const std::string key = kv.first.as<std::string>();
    if (!known.count(key))
      throw ConfigError("scenario: unknown key '" + name + "." + key + "'");
    set(key, kv.second);
  }
}

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

ScenarioConfig parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: YAML parse error: ") + e.what());
  }
  if (root.IsNull()) return {};
  if (!root.IsMap()) throw ConfigError("scenario: top level must be a mapping");

  static const std::set<std::string> sections = {"road",    "attack", "perception",
                                                 "planner", "mpc",    "speed",
                                                 "pid",     "bicycle", "sim"};
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!sections.count(key)) throw ConfigError("scenario: unknown section '" + key + "'");
  }

  ScenarioConfig cfg;

  read_section(root, "road",
               {"length", "lane_width", "curvature", "half_width"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "length") cfg.road.length = v.as<double>();
                 else if (k == "lane_width") cfg.road.lane_width = v.as<double>();
                 else if (k == "curvature") cfg.road.curvature = v.as<double>();
                 else cfg.road.half_width = v.as<double>();
               });

  read_section(root, "attack",
               {"patch_start", "patch_length", "strength", "path_bias_gain", "conf_floor",
                "conf_drop_gain", "exposure_falloff", "bias_direction", "bias_response_power",
                "conf_flicker", "conf_hysteresis_m"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "patch_start") cfg.attack.patch_start = v.as<double>();
                 else if (k == "patch_length") cfg.attack.patch_length = v.as<double>();
                 else if (k == "strength") cfg.attack.strength = v.as<double>();
                 else if (k == "path_bias_gain") cfg.attack.path_bias_gain = v.as<double>();
                 else if (k == "conf_floor") cfg.attack.conf_floor = v.as<double>();
                 else if (k == "conf_drop_gain") cfg.attack.conf_drop_gain = v.as<double>();
                 else if (k == "exposure_falloff") cfg.attack.exposure_falloff = v.as<double>();
                 else if (k == "bias_response_power")
                   cfg.attack.bias_response_power = v.as<double>();
                 else if (k == "conf_flicker") cfg.attack.conf_flicker = v.as<double>();
                 else if (k == "conf_hysteresis_m")
                   cfg.attack.conf_hysteresis_m = v.as<double>();
                 else cfg.attack.bias_direction = v.as<double>();
               });

  read_section(root, "perception",
               {"base_noise_sigma", "noise_growth", "mc_samples", "dropout_rate",
                "noise_components", "station_spacing", "num_points", "benign_confidence",
                "confidence_combiner"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "base_noise_sigma") cfg.perception.base_noise_sigma = v.as<double>();
                 else if (k == "noise_growth") cfg.perception.noise_growth = v.as<double>();
                 else if (k == "mc_samples") cfg.perception.mc_samples = v.as<int>();
                 else if (k == "dropout_rate") cfg.perception.dropout_rate = v.as<double>();
                 else if (k == "noise_components") cfg.perception.noise_components = v.as<int>();
                 else if (k == "station_spacing") cfg.perception.station_spacing = v.as<double>();
                 else if (k == "num_points") cfg.perception.num_points = v.as<int>();
                 else if (k == "benign_confidence")
                   cfg.perception.benign_confidence = v.as<double>();
                 else {
                   const auto s = v.as<std::string>();
                   if (s == "product") cfg.perception.combiner = ConfCombiner::kProduct;
                   else if (s == "min") cfg.perception.combiner = ConfCombiner::kMin;
                   else throw ConfigError("scenario: confidence_combiner must be product|min");
                 }
               });

  read_section(root, "planner",
               {"conf_threshold", "cache_size", "lane_width", "uncertainty_source",
                "fit_weight_source"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "conf_threshold") cfg.planner.conf_threshold = v.as<double>();
                 else if (k == "cache_size") cfg.planner.cache_size = v.as<int>();
                 else if (k == "lane_width") cfg.planner.lane_width = v.as<double>();
                 else if (k == "uncertainty_source") {
                   const auto s = v.as<std::string>();
                   if (s == "total") cfg.planner.unc_source = UncSource::kTotal;
                   else if (s == "data") cfg.planner.unc_source = UncSource::kData;
                   else throw ConfigError("scenario: uncertainty_source must be total|data");
                 } else {
                   const auto s = v.as<std::string>();
                   if (s == "data") cfg.planner.fit_weights = FitWeightSource::kData;
                   else if (s == "total") cfg.planner.fit_weights = FitWeightSource::kTotal;
                   else throw ConfigError("scenario: fit_weight_source must be data|total");
                 }
               });

  read_section(root, "mpc",
               {"horizon", "w_path", "w_exp_left", "w_exp_right", "w_heading", "w_heading_rate",
                "w_steer", "wt_path", "wt_exp_left", "wt_exp_right", "wt_heading",
                "max_steer_deg", "max_heading_deg", "solver_iters", "solver_tol",
                "coarse_samples", "stage_scale"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "horizon") cfg.mpc.horizon = v.as<int>();
                 else if (k == "w_path") cfg.mpc.running.path_error = v.as<double>();
                 else if (k == "w_exp_left") cfg.mpc.running.exp_left = v.as<double>();
                 else if (k == "w_exp_right") cfg.mpc.running.exp_right = v.as<double>();
                 else if (k == "w_heading") cfg.mpc.running.heading_error = v.as<double>();
                 else if (k == "w_heading_rate")
                   cfg.mpc.running.heading_rate_error = v.as<double>();
                 else if (k == "w_steer") cfg.mpc.running.steer_penalty = v.as<double>();
                 else if (k == "wt_path") cfg.mpc.terminal.path_error = v.as<double>();
                 else if (k == "wt_exp_left") cfg.mpc.terminal.exp_left = v.as<double>();
                 else if (k == "wt_exp_right") cfg.mpc.terminal.exp_right = v.as<double>();
                 else if (k == "wt_heading") cfg.mpc.terminal.heading_error = v.as<double>();
                 else if (k == "max_steer_deg") cfg.mpc.max_steer = deg2rad(v.as<double>());
                 else if (k == "max_heading_deg") cfg.mpc.max_heading = deg2rad(v.as<double>());
                 else if (k == "solver_iters") cfg.mpc.solver_iters = v.as<int>();
                 else if (k == "solver_tol") cfg.mpc.solver_tol = v.as<double>();
                 else if (k == "coarse_samples") cfg.mpc.coarse_samples = v.as<int>();
                 else cfg.mpc.stage_scale = v.as<std::vector<double>>();
               });

  read_section(root, "speed", {"alpha_max", "v_min", "v_ref"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "alpha_max") cfg.speed.alpha_max = v.as<double>();
                 else if (k == "v_min") cfg.speed.v_min = v.as<double>();
                 else cfg.speed.v_ref = v.as<double>();
               });

  read_section(root, "pid", {"kp", "ki", "kd", "accel_max", "integral_limit"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "kp") cfg.pid.kp = v.as<double>();
                 else if (k == "ki") cfg.pid.ki = v.as<double>();
                 else if (k == "kd") cfg.pid.kd = v.as<double>();
                 else if (k == "accel_max") cfg.pid.out_max = v.as<double>();
                 else cfg.pid.integral_limit = v.as<double>();
               });

  read_section(root, "bicycle", {"wheelbase"},
               [&](const std::string&, const YAML::Node& v) {
                 cfg.bicycle.wheelbase = v.as<double>();
               });

  read_section(root, "sim",
               {"duration", "dt", "seed", "start_y", "start_heading_deg"},
               [&](const std::string& k, const YAML::Node& v) {
                 if (k == "duration") cfg.duration = v.as<double>();
                 else if (k == "dt") cfg.dt = v.as<double>();
                 else if (k == "seed") cfg.seed = v.as<std::uint64_t>();
                 else if (k == "start_y") cfg.start_y = v.as<double>();
                 else cfg.start_heading = deg2rad(v.as<double>());
               });

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

}  // namespace alc
