#include "alc/controller.hpp"

#include <algorithm>
#include <cmath>

#include "alc/lane_fit.hpp"

namespace alc {

double adapt_speed(double v_current, double conf, const SpeedAdaptConfig& cfg) {
  cfg.validate();
  if (v_current < 0.0) throw DomainError("adapt_speed: v_current must be >= 0");
  if (conf < cfg.conf_threshold)
    return std::max(v_current - cfg.alpha_max * cfg.dt, cfg.v_min);
  return cfg.v_ref;
}

double PidController::update(double error) {
  integral_ = std::clamp(integral_ + error * cfg_.dt, -cfg_.integral_limit, cfg_.integral_limit);
  const double deriv = has_prev_ ? (error - prev_error_) / cfg_.dt : 0.0;
  prev_error_ = error;
  has_prev_ = true;
  const double out = cfg_.kp * error + cfg_.ki * integral_ + cfg_.kd * deriv;
  return std::clamp(out, cfg_.out_min, cfg_.out_max);
}

Pipeline::Pipeline(const PipelineConfig& cfg)
    : cfg_(cfg), cache_(cfg.planner.cache_size), pid_(cfg.pid) {
  cfg_.perception.validate();
  cfg_.attack.validate();
  cfg_.mpc.validate();
  cfg_.speed.validate();
}

void Pipeline::reset() {
  cache_.clear();
  pid_.reset();
}

TickResult Pipeline::tick(const VehicleState& state, int tick_index) {
  // Perception with data variance, MC-dropout model variance and the total
  // variance, all inside observe().
  PerceptionFrame frame = observe(cfg_.road, state, cfg_.attack, cfg_.perception, tick_index);
  frame.timestamp = tick_index * cfg_.mpc.dt;

  TickResult out;
  out.lr_conf = frame.lr_conf;
  auto sigma_sum = [](const UncertaintyProfile& u) {
    double s = 0.0;
    for (double v : u.sigma_total_sq) s += std::sqrt(v);
    return s;
  };
  out.sigma_left_sum = sigma_sum(frame.left_unc);
  out.sigma_right_sum = sigma_sum(frame.right_unc);

  PolyCurve desired, mpc_left, mpc_right;
  if (cfg_.variant == Variant::kBaseline) {
    // Original pipeline: confidence-weighted fusion, plain lanes, no brake.
    desired = baseline_desired_path(frame, cfg_.planner);
    mpc_left = fit_plain_lane(frame.left);
    mpc_right = fit_plain_lane(frame.right);
    out.v_ref = cfg_.speed.v_ref;
    out.selected_tick = tick_index;
  } else {
    // Push, then substitute the highest-confidence cached frame when the
    // current one is below threshold.
    const PerceptionFrame* selected = &frame;
    if (cfg_.variant == Variant::kMitigated) {
      cache_.push(frame);
      selected = &cache_select(cache_, frame, cfg_.planner.conf_threshold);
    }
    out.selected_tick = selected->tick;

    // Bounded lanes from the selected points and the *current*
    // uncertainties, then the uncertainty-aware desired path.
    mpc_left = fit_bounded_lane(selected->left, frame.left_unc, LaneSide::kLeft,
                                cfg_.planner.fit_weights);
    mpc_right = fit_bounded_lane(selected->right, frame.right_unc, LaneSide::kRight,
                                 cfg_.planner.fit_weights);
    desired = desired_path(mpc_left, mpc_right, frame.left_unc, frame.right_unc, frame.lr_conf,
                           *selected, cfg_.planner);

    // Speed adaptation on low confidence.
    out.v_ref = adapt_speed(state.speed, frame.lr_conf, cfg_.speed);
  }

  // The MPC plans at the adapted reference speed.
  VehicleState rollout = state;
  rollout.speed = out.v_ref;
  const MpcResult mpc = mpc_steer(rollout, desired, mpc_left, mpc_right, cfg_.mpc);

  out.steering = mpc.steering;
  out.mpc_cost = mpc.cost;
  out.accel = pid_.update(out.v_ref - state.speed);
  out.desired = desired;
  return out;
}

}  // namespace alc
