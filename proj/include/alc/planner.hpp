#pragma once

#include <deque>

#include "alc/lane_fit.hpp"
#include "alc/types.hpp"

namespace alc {

// Which per-point sigma accumulates into the lane-trust weights.
enum class UncSource { kTotal, kData };

struct PlannerConfig {
  double conf_threshold = 0.5;  // lr_conf below this triggers the bounded path
  int cache_size = 7;           // k most recent frames
  double lane_width = 3.7;      // [m], shifts lane lines to lane center
  UncSource unc_source = UncSource::kTotal;
  FitWeightSource fit_weights = FitWeightSource::kData;
};

// Ring buffer of the k most recent perception frames; eviction is FIFO.
class StateCache {
 public:
  explicit StateCache(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw ConfigError("StateCache: capacity must be >= 1");
  }

  void push(const PerceptionFrame& frame) {
    frames_.push_back(frame);
    while (frames_.size() > static_cast<std::size_t>(capacity_)) frames_.pop_front();
  }

  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }
  int capacity() const { return capacity_; }
  const std::deque<PerceptionFrame>& frames() const { return frames_; }

  void clear() { frames_.clear(); }

 private:
  int capacity_;
  std::deque<PerceptionFrame> frames_;
};

// OpenPilot-style fusion: confidence-weighted average of the centered lane
// lines and the predicted path; the path weight is 1 - lr_conf.
PolyCurve baseline_desired_path(const PerceptionFrame& frame, const PlannerConfig& cfg);

// Uncertainty-aware desired path. High confidence falls through to the
// baseline; low confidence blends the bounded lanes (more weight on the lane
// with less accumulated uncertainty) with the baseline path.
PolyCurve desired_path(const PolyCurve& bounded_left, const PolyCurve& bounded_right,
                       const UncertaintyProfile& left_unc, const UncertaintyProfile& right_unc,
                       double lr_conf, const PerceptionFrame& frame, const PlannerConfig& cfg);

// Accumulated-uncertainty lane weights: each lane's sigma sum, normalized
// and swapped so the less uncertain lane weighs more. Returns
// {w_left, w_right}, each in [0,1], summing to 1.
struct LaneWeights {
  double left;
  double right;
};
LaneWeights lane_uncertainty_weights(const UncertaintyProfile& left_unc,
                                     const UncertaintyProfile& right_unc, UncSource source);

// Cache selection: below the confidence threshold, substitute the
// cached frame with the highest lr_conf (ties go to the most recent); the
// current frame must already be in the cache.
const PerceptionFrame& cache_select(const StateCache& cache, const PerceptionFrame& current,
                                    double conf_threshold);

}  // namespace alc
