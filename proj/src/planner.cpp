#include "alc/planner.hpp"

#include <cmath>

#include "alc/errors.hpp"

namespace alc {

PolyCurve baseline_desired_path(const PerceptionFrame& frame, const PlannerConfig& cfg) {
  const double c_l = frame.left_conf;
  const double c_r = frame.right_conf;
  const double c_p = 1.0 - frame.lr_conf;
  const double total = c_l + c_r + c_p;
  if (total <= 0.0) throw DegenerateWeightsError("baseline_desired_path: all weights zero");

  const PolyCurve p_l = fit_plain_lane(frame.left);
  const PolyCurve p_r = fit_plain_lane(frame.right);
  const PolyCurve p_p = fit_plain_lane(frame.path);

  const double half_w = 0.5 * cfg.lane_width;
  std::array<double, PolyCurve::kNumCoeffs> c{};
  for (int k = 0; k < PolyCurve::kNumCoeffs; ++k)
    c[static_cast<std::size_t>(k)] =
        (c_l * p_l.coeffs()[static_cast<std::size_t>(k)] +
         c_r * p_r.coeffs()[static_cast<std::size_t>(k)] +
         c_p * p_p.coeffs()[static_cast<std::size_t>(k)]) /
        total;
  // Lane lines enter the average shifted to lane center.
  c[0] += (c_l * (-half_w) + c_r * half_w) / total;
  return PolyCurve(c, p_l.s_min(), p_l.s_max());
}

LaneWeights lane_uncertainty_weights(const UncertaintyProfile& left_unc,
                                     const UncertaintyProfile& right_unc, UncSource source) {
  auto accumulate = [source](const UncertaintyProfile& u) {
    double sum = 0.0;
    const auto& var = source == UncSource::kTotal ? u.sigma_total_sq : u.sigma_data_sq;
    for (double v : var) sum += std::sqrt(v);
    return sum;
  };
  const double left_sum = accumulate(left_unc);
  const double right_sum = accumulate(right_unc);
  const double total = left_sum + right_sum;
  if (total <= 0.0) return {0.5, 0.5};
  // The lane with less accumulated uncertainty gets more weight.
  return {right_sum / total, left_sum / total};
}

PolyCurve desired_path(const PolyCurve& bounded_left, const PolyCurve& bounded_right,
                       const UncertaintyProfile& left_unc, const UncertaintyProfile& right_unc,
                       double lr_conf, const PerceptionFrame& frame, const PlannerConfig& cfg) {
  const PolyCurve p_openpilot = baseline_desired_path(frame, cfg);
  if (lr_conf >= cfg.conf_threshold) return p_openpilot;

  const LaneWeights w = lane_uncertainty_weights(left_unc, right_unc, cfg.unc_source);
  const PolyCurve p_weighted = PolyCurve::affine(w.left, bounded_left, w.right, bounded_right);
  return PolyCurve::affine(1.0 - lr_conf, p_weighted, lr_conf, p_openpilot);
}

const PerceptionFrame& cache_select(const StateCache& cache, const PerceptionFrame& current,
                                    double conf_threshold) {
  if (cache.empty()) throw ConfigError("cache_select: cache is empty");
  if (current.lr_conf >= conf_threshold) return current;
  const PerceptionFrame* best = nullptr;
  for (const auto& f : cache.frames())  // oldest to newest; >= keeps the newest tie
    if (best == nullptr || f.lr_conf >= best->lr_conf) best = &f;
  return *best;
}

}  // namespace alc
