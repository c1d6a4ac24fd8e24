#include "alc/perception.hpp"

#include <algorithm>
#include <cmath>

namespace alc {

double combine_confidence(double left_conf, double right_conf, ConfCombiner c) {
  if (c == ConfCombiner::kProduct) return left_conf * right_conf;
  return std::min(left_conf, right_conf);
}

double patch_exposure(const AttackSpec& attack, double x_ego, double lookahead) {
  const double a = std::max(attack.patch_start, x_ego);
  const double b = std::min(attack.patch_start + attack.patch_length, x_ego + lookahead);
  if (b <= a || lookahead <= 0.0) return 0.0;
  // Integrate (1 - s/L)^q over the overlap, normalized by the full-window
  // integral; closed form via the antiderivative of the falloff kernel.
  const double q = attack.exposure_falloff;
  const double u0 = 1.0 - (a - x_ego) / lookahead;  // kernel arg at overlap start
  const double u1 = 1.0 - (b - x_ego) / lookahead;
  return std::pow(u0, q + 1.0) - std::pow(u1, q + 1.0);
}

double attack_response(const AttackSpec& attack, double x_ego, double lookahead) {
  const double e = patch_exposure(attack, x_ego, lookahead);
  return std::min(1.0, attack.conf_drop_gain * e * attack.strength);
}

double patch_exposure_latched(const AttackSpec& attack, double x_ego, double lookahead) {
  // Sampled rolling max; the exposure is smooth at the meter scale.
  constexpr int kSamples = 16;
  double e = patch_exposure(attack, x_ego, lookahead);
  for (int k = 1; k <= kSamples; ++k) {
    const double xi = x_ego - attack.conf_hysteresis_m * k / kSamples;
    e = std::max(e, patch_exposure(attack, xi, lookahead));
  }
  return e;
}

double attack_response_latched(const AttackSpec& attack, double x_ego, double lookahead) {
  return std::min(1.0, attack.conf_drop_gain *
                           patch_exposure_latched(attack, x_ego, lookahead) * attack.strength);
}

double path_bias(const AttackSpec& attack, double x_ego, double lookahead) {
  const double r = attack_response(attack, x_ego, lookahead);
  return attack.bias_direction * attack.path_bias_gain * attack.strength *
         std::pow(r, attack.bias_response_power);
}

std::vector<double> mc_variance(const std::vector<std::vector<double>>& samples) {
  if (samples.size() < 2) throw ConfigError("mc_variance: need at least 2 samples");
  const std::size_t n = samples.front().size();
  std::vector<double> mean(n, 0.0), m2(n, 0.0);
  double count = 0.0;
  for (const auto& s : samples) {
    if (s.size() != n) throw ShapeError("mc_variance: inconsistent sample lengths");
    count += 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = s[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (s[i] - mean[i]);
    }
  }
  std::vector<double> var(n);
  for (std::size_t i = 0; i < n; ++i) var[i] = m2[i] / count;
  return var;
}

UncertaintyProfile total_variance(std::span<const double> sigma_data_sq,
                                  std::span<const double> sigma_model_sq) {
  if (sigma_data_sq.size() != sigma_model_sq.size())
    throw ShapeError("total_variance: profile length mismatch");
  UncertaintyProfile p;
  p.sigma_data_sq.assign(sigma_data_sq.begin(), sigma_data_sq.end());
  p.sigma_model_sq.assign(sigma_model_sq.begin(), sigma_model_sq.end());
  p.sigma_total_sq.resize(sigma_data_sq.size());
  for (std::size_t i = 0; i < sigma_data_sq.size(); ++i) {
    if (sigma_data_sq[i] < 0.0 || sigma_model_sq[i] < 0.0)
      throw DomainError("total_variance: negative variance");
    p.sigma_total_sq[i] = sigma_data_sq[i] + sigma_model_sq[i];
  }
  return p;
}

double nll_loss(double y, double mu, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw DomainError("nll_loss: sigma_sq must be > 0");
  const double r = y - mu;
  return 0.5 * std::log(sigma_sq) + r * r / (2.0 * sigma_sq);
}

namespace {

enum LaneId : int { kLeft = 0, kRight = 1, kPath = 2 };

// Per-tick noise realization: `components[lane][i*K + k]`, plus the attack
// bias on the predicted path. The dropout pass masks exactly these values.
struct NoiseField {
  std::vector<double> components[3];
  std::vector<double> path_bias;
  int num_points = 0;
  int num_components = 0;
};

double lane_truth(const RoadGeometry& road, int lane, double x_abs) {
  switch (lane) {
    case kLeft: return road.left_line_y(x_abs);
    case kRight: return road.right_line_y(x_abs);
    default: return road.center_y(x_abs);
  }
}

NoiseField draw_noise_field(const VehicleState& state, const AttackSpec& attack,
                            const PerceptionConfig& cfg,
                            const std::vector<double>& stations, int tick) {
  NoiseField f;
  f.num_points = cfg.num_points;
  f.num_components = cfg.noise_components;
  auto rng = make_rng(cfg.seed, {rng_salt::kNoiseField, static_cast<std::uint64_t>(tick)});
  std::normal_distribution<double> unit(0.0, 1.0);
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(cfg.noise_components));
  for (int lane = 0; lane < 3; ++lane) {
    auto& c = f.components[lane];
    c.resize(static_cast<std::size_t>(cfg.num_points) * cfg.noise_components);
    for (int i = 0; i < cfg.num_points; ++i) {
      const double sigma_i = cfg.noise_sigma(stations[static_cast<std::size_t>(i)]);
      for (int k = 0; k < cfg.noise_components; ++k)
        c[static_cast<std::size_t>(i) * cfg.noise_components + k] =
            sigma_i * inv_sqrt_k * unit(rng);
    }
  }
  // The whole predicted path bends by the attack response: the corruption
  // grows as the patch fills the view, like the confidence drop does, so
  // consecutive frames differ most during the onset.
  f.path_bias.assign(static_cast<std::size_t>(cfg.num_points),
                     path_bias(attack, state.x, cfg.lookahead()));
  return f;
}

// One forward pass of the stand-in model with a multiplicative mask on every
// internal component. `mask` returns 1 for the deterministic pass or a
// Bernoulli(1-phi)/(1-phi) draw for a dropout sample.
template <typename MaskFn>
std::vector<double> forward_lane(const RoadGeometry& road, const VehicleState& state,
                                 const std::vector<double>& stations, const NoiseField& f,
                                 int lane, MaskFn&& mask) {
  std::vector<double> out(static_cast<std::size_t>(f.num_points));
  for (int i = 0; i < f.num_points; ++i) {
    double v = lane_truth(road, lane, state.x + stations[static_cast<std::size_t>(i)]);
    for (int k = 0; k < f.num_components; ++k)
      v += mask() * f.components[lane][static_cast<std::size_t>(i) * f.num_components + k];
    if (lane == kPath) v += mask() * f.path_bias[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

}  // namespace

PerceptionFrame observe(const RoadGeometry& road, const VehicleState& state,
                        const AttackSpec& attack, const PerceptionConfig& cfg, int tick) {
  cfg.validate();
  attack.validate();

  std::vector<double> stations(static_cast<std::size_t>(cfg.num_points));
  for (int i = 0; i < cfg.num_points; ++i)
    stations[static_cast<std::size_t>(i)] = cfg.station_spacing * (i + 1);

  const NoiseField field = draw_noise_field(state, attack, cfg, stations, tick);
  auto ones = [] { return 1.0; };

  PerceptionFrame frame;
  frame.tick = tick;
  frame.timestamp = 0.0;  // filled by the caller, which knows the tick period

  std::vector<double> sigma_data_sq(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const double s = cfg.noise_sigma(stations[i]);
    sigma_data_sq[i] = s * s;
  }

  const double phi = cfg.dropout_rate;
  LanePointSet* sets[3] = {&frame.left, &frame.right, &frame.path};
  UncertaintyProfile* uncs[3] = {&frame.left_unc, &frame.right_unc, &frame.path_unc};
  for (int lane = 0; lane < 3; ++lane) {
    *sets[lane] = LanePointSet(stations, forward_lane(road, state, stations, field, lane, ones));
    // Sample variance over T dropout passes of the same realized field;
    // each sample's mask stream is derived from (seed, tick, t).
    std::vector<std::vector<double>> draws;
    draws.reserve(static_cast<std::size_t>(cfg.mc_samples));
    for (int t = 0; t < cfg.mc_samples; ++t) {
      auto rng = make_rng(cfg.seed, {rng_salt::kDropout, static_cast<std::uint64_t>(tick),
                                     static_cast<std::uint64_t>(lane),
                                     static_cast<std::uint64_t>(t)});
      draws.push_back(forward_lane(road, state, stations, field, lane,
                                   [&] { return dropout_scale(rng, phi); }));
    }
    *uncs[lane] = total_variance(sigma_data_sq, mc_variance(draws));
  }

  // Attack channel: both lane confidences decay from the benign baseline
  // toward the per-lane floor; the floor is chosen so the combined lr_conf
  // bottoms out exactly at conf_floor. The alarm is latched (hysteresis) and
  // jitters frame to frame, which is what makes the highest-confidence frame
  // in a cache window meaningfully better than its neighbors.
  auto flicker_rng =
      make_rng(cfg.seed, {rng_salt::kConfFlicker, static_cast<std::uint64_t>(tick)});
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  const double jitter = 1.0 - attack.conf_flicker * unit01(flicker_rng);
  const double raw = attack.conf_drop_gain *
                     patch_exposure_latched(attack, state.x, cfg.lookahead()) *
                     attack.strength * jitter;
  const double suppression = std::min(1.0, raw);
  const double lane_floor = cfg.combiner == ConfCombiner::kProduct
                                ? std::sqrt(attack.conf_floor)
                                : attack.conf_floor;
  const double conf = cfg.benign_confidence -
                      (cfg.benign_confidence - lane_floor) * suppression;
  frame.left_conf = conf;
  frame.right_conf = conf;
  frame.lr_conf = combine_confidence(frame.left_conf, frame.right_conf, cfg.combiner);
  return frame;
}

}  // namespace alc
