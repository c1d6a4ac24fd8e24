#include "alc/harness.hpp"

#include <algorithm>
#include <cmath>

namespace alc {

ScenarioConfig ScenarioConfig::normalized() const {
  ScenarioConfig c = *this;
  c.perception.seed = seed;
  c.mpc.dt = dt;
  c.speed.dt = dt;
  c.pid.dt = dt;
  c.bicycle.dt = dt;
  c.mpc.wheelbase = c.bicycle.wheelbase;
  c.speed.conf_threshold = c.planner.conf_threshold;
  c.pid.out_min = -c.speed.alpha_max;
  return c;
}

PipelineConfig ScenarioConfig::pipeline_config(Variant variant) const {
  const ScenarioConfig c = normalized();
  PipelineConfig p;
  p.road = c.road;
  p.attack = c.attack;
  p.perception = c.perception;
  p.planner = c.planner;
  p.mpc = c.mpc;
  p.speed = c.speed;
  p.pid = c.pid;
  p.variant = variant;
  return p;
}

double lateral_deviation(const RoadGeometry& road, double x, double y) {
  return y - road.center_y(x);
}

RunResult run_scenario(const ScenarioConfig& cfg_in, Variant variant) {
  const ScenarioConfig cfg = cfg_in.normalized();
  cfg.validate();

  Pipeline pipeline(cfg.pipeline_config(variant));
  VehicleState state;
  state.x = 0.0;
  state.y = cfg.start_y + cfg.road.center_y(0.0);
  state.heading = cfg.start_heading;
  state.speed = cfg.speed.v_ref;

  RunResult result;
  result.variant = variant;
  result.seed = cfg.seed;
  const int n_ticks = static_cast<int>(std::llround(cfg.duration / cfg.dt));
  result.trace.reserve(static_cast<std::size_t>(n_ticks));

  for (int tick = 0; tick < n_ticks; ++tick) {
    const TickResult cmd = pipeline.tick(state, tick);
    const double dev = lateral_deviation(cfg.road, state.x, state.y);
    result.max_abs_lateral_deviation =
        std::max(result.max_abs_lateral_deviation, std::abs(dev));
    if (std::abs(dev) > kLaneDepartureMeters) result.out_of_lane = true;

    result.trace.push_back({tick, tick * cfg.dt, state.x, state.y, state.heading, state.speed,
                            cmd.steering, cmd.accel, cmd.lr_conf, cmd.sigma_left_sum,
                            cmd.sigma_right_sum, cmd.v_ref});

    state = bicycle_step(state, cmd.steering, cmd.accel, cfg.bicycle);
    const double next_dev = lateral_deviation(cfg.road, state.x, state.y);
    if (std::abs(next_dev) > cfg.road.half_width || state.x > cfg.road.length) {
      result.out_of_lane = true;
      result.truncated = true;
      break;
    }
  }
  return result;
}

std::optional<double> mitigation_percent(const RunResult& baseline, const RunResult& mitigated) {
  if (baseline.max_abs_lateral_deviation <= 0.0) return std::nullopt;
  return (1.0 - mitigated.max_abs_lateral_deviation / baseline.max_abs_lateral_deviation) * 100.0;
}

std::vector<SweepCell> sweep(const ScenarioConfig& base, const std::vector<double>& positions,
                             const std::vector<double>& strengths) {
  if (positions.empty() || strengths.empty())
    throw ConfigError("sweep: positions and strengths must be nonempty");
  std::vector<SweepCell> cells;
  cells.reserve(positions.size() * strengths.size());
  for (double pos : positions) {
    for (double strength : strengths) {
      ScenarioConfig cfg = base;
      cfg.attack.patch_start = pos;
      cfg.attack.strength = strength;
      SweepCell cell;
      cell.patch_position = pos;
      cell.strength = strength;
      cell.baseline = run_scenario(cfg, Variant::kBaseline);
      cell.mitigated = run_scenario(cfg, Variant::kMitigated);
      if (strength > 0.0) {
        cell.mitigation_pct = mitigation_percent(cell.baseline, cell.mitigated);
        cell.mitigated.mitigation_pct = cell.mitigation_pct;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

ScenarioConfig reference_scenario(const ScenarioConfig& base) {
  ScenarioConfig cfg = base;
  cfg.attack.patch_start = 40.0;
  cfg.attack.strength = 1.0;
  return cfg;
}

CalibrationResult calibrate(const ScenarioConfig& base, double dev_lo, double dev_hi) {
  const ScenarioConfig ref = reference_scenario(base);
  const double target = 0.5 * (dev_lo + dev_hi);

  auto baseline_dev = [&](double gain) {
    ScenarioConfig cfg = ref;
    cfg.attack.path_bias_gain = gain;
    return run_scenario(cfg, Variant::kBaseline).max_abs_lateral_deviation;
  };

  CalibrationResult cal;
  cal.conf_floor = ref.attack.conf_floor;

  // Deviation grows with the injected path bias; bracket the target then
  // bisect. The loose inner band keeps the result well inside [lo, hi].
  double lo = 0.25, hi = 2.0;
  double dev_at_hi = baseline_dev(hi);
  int expand = 0;
  while (dev_at_hi < target && expand++ < 8) {
    hi *= 2.0;
    dev_at_hi = baseline_dev(hi);
  }
  double dev_at_lo = baseline_dev(lo);
  if (dev_at_lo > target) lo = 0.01;

  double best_gain = hi, best_dev = dev_at_hi;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double dev = baseline_dev(mid);
    if (std::abs(dev - target) < std::abs(best_dev - target)) {
      best_gain = mid;
      best_dev = dev;
    }
    if (dev > dev_lo + 0.15 && dev < dev_hi - 0.15) {
      best_gain = mid;
      best_dev = dev;
      break;
    }
    (dev < target ? lo : hi) = mid;
    if (hi - lo < 1e-4) break;
  }

  cal.path_bias_gain = best_gain;
  cal.baseline_deviation = best_dev;
  cal.converged = best_dev >= dev_lo && best_dev <= dev_hi;
  return cal;
}

ScenarioConfig apply_calibration(const ScenarioConfig& cfg, const CalibrationResult& cal) {
  ScenarioConfig out = cfg;
  out.attack.path_bias_gain = cal.path_bias_gain;
  out.attack.conf_floor = cal.conf_floor;
  return out;
}

}  // namespace alc
