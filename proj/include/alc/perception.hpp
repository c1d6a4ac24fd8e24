#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alc/errors.hpp"
#include "alc/random.hpp"
#include "alc/types.hpp"

namespace alc {

enum class ConfCombiner { kProduct, kMin };

// Synthetic perception model: observation noise grows with distance, the
// variance head reports the noise schedule actually used, and model
// uncertainty comes from Monte-Carlo dropout over the internal noise
// components.
struct PerceptionConfig {
  double base_noise_sigma = 0.03;   // [m] noise std at s = 0
  double noise_growth = 0.02;       // per-meter growth of noise std
  int mc_samples = 20;              // T
  double dropout_rate = 0.2;        // Phi, in (0,1)
  std::uint64_t seed = 0;
  int noise_components = 8;         // internal components per point
  double station_spacing = 0.5;     // [m] between the 192 stations
  int num_points = kLanePointCount;
  double benign_confidence = 0.9;   // per-lane confidence with no attack
  ConfCombiner combiner = ConfCombiner::kProduct;

  void validate() const {
    if (mc_samples < 2) throw ConfigError("PerceptionConfig: mc_samples must be >= 2");
    if (!(dropout_rate > 0.0 && dropout_rate < 1.0))
      throw ConfigError("PerceptionConfig: dropout_rate must be in (0,1)");
    if (noise_components < 1) throw ConfigError("PerceptionConfig: noise_components >= 1");
    if (num_points < 1) throw ConfigError("PerceptionConfig: num_points >= 1");
    if (!(station_spacing > 0.0)) throw ConfigError("PerceptionConfig: station_spacing > 0");
  }

  // Noise std at station s.
  double noise_sigma(double s) const { return base_noise_sigma * (1.0 + noise_growth * s); }

  double lookahead() const { return station_spacing * num_points; }
};

// Dirty-patch attack emulated at the perception output: confidence
// suppression on both lane lines plus a lateral bias on the predicted path,
// both scaled by the patch exposure in the lookahead window.
struct AttackSpec {
  double patch_start = 40.0;    // [m] along road
  double patch_length = 96.0;   // [m]
  double strength = 0.0;        // maps PAR, [0,1]
  double path_bias_gain = 3.0;  // [m] lateral bias at full strength
  double conf_floor = 0.12;     // combined-confidence floor under full attack
  double conf_drop_gain = 4.0;  // slope of suppression vs exposure*strength
  double exposure_falloff = 5.0;  // distance-weighting exponent of the window
  double bias_direction = 1.0;  // +1 bends the path left
  double bias_response_power = 2.0;  // path bend follows response^power; the
                                     // confidence alarm leads the corruption
  double conf_flicker = 0.7;    // per-frame jitter of the confidence alarm
  double conf_hysteresis_m = 25.0;  // alarm stays raised until the response
                                    // has been clear for this distance

  void validate() const {
    if (!(patch_length > 0.0)) throw ConfigError("AttackSpec: patch_length must be > 0");
    if (strength < 0.0 || strength > 1.0)
      throw ConfigError("AttackSpec: strength must be in [0,1]");
    if (conf_floor < 0.0 || conf_floor > 1.0)
      throw ConfigError("AttackSpec: conf_floor must be in [0,1]");
  }

  static AttackSpec none() {
    AttackSpec a;
    a.strength = 0.0;
    return a;
  }
};

double combine_confidence(double left_conf, double right_conf, ConfCombiner c);

// Exposure of the lookahead window [x_ego, x_ego + lookahead] to the patch:
// overlap weighted by (1 - s/L)^falloff so near-field patch surface counts
// more than far-field, normalized to 1 for a fully covered window.
double patch_exposure(const AttackSpec& attack, double x_ego, double lookahead);

// Saturating response in [0,1]: min(1, conf_drop_gain * exposure * strength).
double attack_response(const AttackSpec& attack, double x_ego, double lookahead);

// Rolling maximum of the exposure over the last conf_hysteresis_m meters: the
// confidence alarm raises as fast as the exposure but clears only once the
// exposure has been low for the whole window.
double patch_exposure_latched(const AttackSpec& attack, double x_ego, double lookahead);

// Saturating response on the latched exposure (the alarm's response curve).
double attack_response_latched(const AttackSpec& attack, double x_ego, double lookahead);

// Lateral bias on the predicted path: bias_direction * path_bias_gain *
// strength * response^bias_response_power. The corruption trails the alarm
// on the way in and vanishes before the alarm clears on the way out. Peaks
// at path_bias_gain * strength when the patch fills the window.
double path_bias(const AttackSpec& attack, double x_ego, double lookahead);

// Population variance per output point over the dropout samples:
// sigma_model^2 = (1/T) * sum_t (mu_t - mu_bar)^2.
// Welford accumulation, samples consumed in index order.
std::vector<double> mc_variance(const std::vector<std::vector<double>>& samples);

// One dropout mask draw: 0 with probability phi, 1/(1-phi) otherwise.
inline double dropout_scale(std::mt19937_64& rng, double phi) {
  std::bernoulli_distribution keep(1.0 - phi);
  return keep(rng) ? 1.0 / (1.0 - phi) : 0.0;
}

// Monte-Carlo model-uncertainty estimator. `sample` is called T times with a
// deterministic per-sample RNG (derived from seed and the sample index, so
// samples could be generated in parallel); the variance reduction consumes
// them in index order.
template <typename SampleFn>
std::vector<double> mc_model_variance(SampleFn&& sample, int t_samples, std::uint64_t seed) {
  if (t_samples < 2) throw ConfigError("mc_model_variance: need at least 2 samples");
  std::vector<std::vector<double>> draws;
  draws.reserve(static_cast<std::size_t>(t_samples));
  for (int t = 0; t < t_samples; ++t) {
    auto rng = make_rng(seed, {rng_salt::kMcGeneric, static_cast<std::uint64_t>(t)});
    draws.push_back(sample(rng));
  }
  return mc_variance(draws);
}

// Elementwise sigma_total^2 = sigma_data^2 + sigma_model^2.
UncertaintyProfile total_variance(std::span<const double> sigma_data_sq,
                                  std::span<const double> sigma_model_sq);

// Gaussian negative log-likelihood (calibration criterion for the variance
// head): log(sigma^2)/2 + (y - mu)^2 / (2 sigma^2).
double nll_loss(double y, double mu, double sigma_sq);

// Full perception tick: noisy lane observations from ground truth, data
// variances, MC-dropout model variances, and attack-channel effects.
// Deterministic given (cfg.seed, tick). Offsets are absolute lateral
// positions; stations are ego-relative.
PerceptionFrame observe(const RoadGeometry& road, const VehicleState& state,
                        const AttackSpec& attack, const PerceptionConfig& cfg, int tick);

}  // namespace alc
