#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alc/controller.hpp"
#include "alc/dynamics.hpp"
#include "alc/types.hpp"

namespace alc {

// Full scenario description. `dt` and `seed` are scenario-level: they are
// propagated into every sub-config before a run (the whole pipeline steps at
// one rate), as are the shared confidence threshold and wheelbase.
struct ScenarioConfig {
  RoadGeometry road;
  AttackSpec attack;
  PerceptionConfig perception;
  PlannerConfig planner;
  MpcConfig mpc;
  SpeedAdaptConfig speed;
  PidConfig pid;
  BicycleParams bicycle;
  double duration = 30.0;  // [s]
  double dt = 0.05;        // [s]
  std::uint64_t seed = 42;
  double start_y = 0.0;        // initial lateral offset from lane center
  double start_heading = 0.0;  // [rad]

  // Copy with the shared scalars propagated into the sub-configs.
  ScenarioConfig normalized() const;
  PipelineConfig pipeline_config(Variant variant) const;

  void validate() const {
    if (!(duration > 0.0)) throw ConfigError("ScenarioConfig: duration must be > 0");
    if (!(dt > 0.0)) throw ConfigError("ScenarioConfig: dt must be > 0");
  }
};

struct TraceRow {
  int tick;
  double t, x, y, heading, v, steering, accel, lr_conf, sigma_left_sum, sigma_right_sum, v_ref;
};

struct RunResult {
  std::vector<TraceRow> trace;
  double max_abs_lateral_deviation = 0.0;  // vs lane center
  bool out_of_lane = false;                // |deviation| exceeded 0.735 m
  bool truncated = false;                  // vehicle left the road extent
  Variant variant = Variant::kBaseline;
  std::uint64_t seed = 0;
  std::optional<double> mitigation_pct;    // filled when paired with a baseline run
};

RunResult run_scenario(const ScenarioConfig& cfg, Variant variant);

struct SweepCell {
  double patch_position = 0.0;
  double strength = 0.0;
  RunResult baseline;
  RunResult mitigated;
  std::optional<double> mitigation_pct;  // undefined with no effective attack
};

// Cross-product of patch positions and strengths; each cell pairs a baseline
// run with a mitigated run and reports the deviation reduction.
std::vector<SweepCell> sweep(const ScenarioConfig& base, const std::vector<double>& positions,
                             const std::vector<double>& strengths);

// Attack calibration (the emulated patch has no physical pixels, so its
// closed-loop effect is pinned to the reported baseline deviation band):
// bisects path_bias_gain until the baseline run on the reference scenario
// (patch at 40 m, full strength, cruise speed) peaks inside [lo, hi] meters.
struct CalibrationResult {
  double path_bias_gain = 0.0;
  double conf_floor = 0.0;
  double baseline_deviation = 0.0;
  bool converged = false;
};

CalibrationResult calibrate(const ScenarioConfig& base, double dev_lo = 0.8, double dev_hi = 1.2);

ScenarioConfig reference_scenario(const ScenarioConfig& base);

// Lateral deviation of a trace row against the road centerline.
double lateral_deviation(const RoadGeometry& road, double x, double y);

std::optional<double> mitigation_percent(const RunResult& baseline, const RunResult& mitigated);

// ---- file outputs ----

void write_trace_csv(const RunResult& result, const std::string& path);
void write_summary_json(const RunResult& result, const ScenarioConfig& cfg,
                        const std::string& path);
void export_run(const RunResult& result, const ScenarioConfig& cfg, const std::string& out_dir);
void export_sweep(const std::vector<SweepCell>& cells, const ScenarioConfig& base,
                  const std::string& out_dir);

void write_calibration_lock(const CalibrationResult& cal, const ScenarioConfig& reference,
                            const std::string& path);
// Returns the calibration if the lockfile exists and parses.
std::optional<CalibrationResult> read_calibration_lock(const std::string& path);
ScenarioConfig apply_calibration(const ScenarioConfig& cfg, const CalibrationResult& cal);

// Aggregates cell.json summaries under `in_dir` into markdown and CSV tables.
void write_report(const std::string& in_dir, const std::string& out_dir);

}  // namespace alc
