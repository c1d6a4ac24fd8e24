#pragma once

#include <vector>

#include "alc/perception.hpp"
#include "alc/planner.hpp"
#include "alc/types.hpp"

namespace alc {

// Per-term weights of the MPC reference vector
// H_r = [path error, exp(left-bound slack), exp(right-bound slack),
//        heading error, heading-rate error, steering penalty].
struct MpcWeights {
  double path_error = 1.0;
  double exp_left = 1.0;
  double exp_right = 1.0;
  double heading_error = 1.0;
  double heading_rate_error = 0.1;
  double steer_penalty = 0.01;
};

struct MpcConfig {
  int horizon = 20;     // N steps
  double dt = 0.05;     // [s]
  MpcWeights running;   // W1
  MpcWeights terminal;  // W2; heading-rate and steering terms are not used
  std::vector<double> stage_scale;  // optional per-stage multiplier of W1
  double max_steer = kMaxSteerRad;
  double max_heading = kMaxHeadingRad;
  double wheelbase = 2.7;   // [m]
  int solver_iters = 8;     // coordinate-descent sweeps
  double solver_tol = 1e-9; // stop when a sweep improves cost less than this
  int coarse_samples = 21;  // candidates per coordinate scan

  void validate() const {
    if (horizon < 1) throw ConfigError("MpcConfig: horizon must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("MpcConfig: dt must be > 0");
    if (!(max_steer > 0.0) || !(max_heading > 0.0))
      throw ConfigError("MpcConfig: constraint bounds must be > 0");
    if (solver_iters < 1 || coarse_samples < 3)
      throw ConfigError("MpcConfig: solver parameters out of range");
    if (!stage_scale.empty() && stage_scale.size() != static_cast<std::size_t>(horizon))
      throw ConfigError("MpcConfig: stage_scale must be empty or horizon-sized");
    for (const MpcWeights* w : {&running, &terminal})
      if (w->path_error < 0.0 || w->exp_left < 0.0 || w->exp_right < 0.0 ||
          w->heading_error < 0.0 || w->heading_rate_error < 0.0 || w->steer_penalty < 0.0)
        throw ConfigError("MpcConfig: weights must be >= 0");
  }
};

struct MpcResult {
  double steering = 0.0;                 // first control of the minimizing sequence
  std::vector<double> controls;          // u_1..u_N
  std::vector<VehicleState> predicted;   // x_1..x_N
  std::vector<double> cost_history;      // total cost after each sweep, non-increasing
  double cost = 0.0;
};

// Receding-horizon steering: minimizes the running + terminal cost of the
// reference vector over the steering sequence, subject to the kinematic
// bicycle rollout at the state's speed, with heading and steering limits
// enforced by clamped projection. Iterative coordinate descent from the
// zero-steering sequence.
MpcResult mpc_steer(const VehicleState& state, const PolyCurve& p_d, const PolyCurve& p_l,
                    const PolyCurve& p_r, const MpcConfig& cfg);

// Cost of an explicit steering sequence under the same rollout; exposed for
// the solver oracle.
double mpc_sequence_cost(const VehicleState& state, const PolyCurve& p_d, const PolyCurve& p_l,
                         const PolyCurve& p_r, const MpcConfig& cfg,
                         std::vector<double> controls);

struct SpeedAdaptConfig {
  double alpha_max = 4.0;       // [m/s^2] emergency deceleration
  double v_min = 5.0;           // [m/s]
  double v_ref = 20.0;          // [m/s] cruise reference
  double conf_threshold = 0.5;  // shared with the planner
  double dt = 0.05;             // [s]

  void validate() const {
    if (!(alpha_max > 0.0)) throw ConfigError("SpeedAdaptConfig: alpha_max must be > 0");
    if (!(v_min > 0.0) || v_min > v_ref)
      throw ConfigError("SpeedAdaptConfig: need 0 < v_min <= v_ref");
  }
};

// Low confidence ramps the speed reference down by alpha_max per second,
// floored at v_min; otherwise the cruise reference is returned.
double adapt_speed(double v_current, double conf, const SpeedAdaptConfig& cfg);

struct PidConfig {
  double kp = 4.0;
  double ki = 2.0;
  double kd = 0.0;
  double dt = 0.05;
  double out_min = -4.0;         // brake limit, tied to alpha_max
  double out_max = 2.0;          // acceleration limit
  double integral_limit = 2.0;   // anti-windup clamp on the integral state
};

class PidController {
 public:
  explicit PidController(const PidConfig& cfg) : cfg_(cfg) {}

  double update(double error);
  void reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    has_prev_ = false;
  }

  double integral() const { return integral_; }

 private:
  PidConfig cfg_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  bool has_prev_ = false;
};

enum class Variant { kBaseline, kMitigated, kMitigatedNoCache };

struct PipelineConfig {
  RoadGeometry road;
  AttackSpec attack;
  PerceptionConfig perception;
  PlannerConfig planner;
  MpcConfig mpc;
  SpeedAdaptConfig speed;
  PidConfig pid;
  Variant variant = Variant::kMitigated;
};

struct TickResult {
  double steering = 0.0;
  double accel = 0.0;
  double v_ref = 0.0;
  double lr_conf = 0.0;
  double sigma_left_sum = 0.0;   // accumulated sigma_total along the left lane
  double sigma_right_sum = 0.0;
  int selected_tick = 0;         // frame the planner consumed (cache substitution)
  double mpc_cost = 0.0;
  PolyCurve desired;
};

// One vehicle's perception-plan-control loop. The baseline variant is the
// original confidence-weighted pipeline; the mitigated variants run the
// uncertainty-aware path, with or without the state cache.
class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& cfg);

  TickResult tick(const VehicleState& state, int tick_index);
  void reset();

  const StateCache& cache() const { return cache_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
  StateCache cache_;
  PidController pid_;
};

}  // namespace alc
