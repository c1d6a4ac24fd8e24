#include <doctest.h>

#include <cmath>
#include <random>

#include "alc/perception.hpp"
#include "oracles.hpp"

using namespace alc;

namespace {

PerceptionConfig small_cfg() {
  PerceptionConfig cfg;
  cfg.seed = 1234;
  return cfg;
}

}  // namespace

TEST_CASE("nll loss: spot values and domain error") {
  CHECK(nll_loss(1.0, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(nll_loss(2.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(nll_loss(3.0, 1.0, 4.0) == doctest::Approx(std::log(4.0) / 2.0 + 0.5).epsilon(1e-12));
  CHECK_THROWS_AS(nll_loss(1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(nll_loss(1.0, 1.0, -0.5), DomainError);
}

TEST_CASE("total variance: elementwise sum, identity, shape error") {
  std::vector<double> d{0.03}, m{0.01};
  const auto p = total_variance(d, m);
  CHECK(p.sigma_total_sq[0] == doctest::Approx(0.04).epsilon(1e-15));

  std::vector<double> zero{0.0};
  const auto q = total_variance(d, zero);
  CHECK(q.sigma_total_sq[0] == d[0]);

  std::vector<double> longer{0.1, 0.2};
  CHECK_THROWS_AS(total_variance(d, longer), ShapeError);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(192), b(192);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng);
  const auto r = total_variance(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(r.sigma_total_sq[i] == a[i] + b[i]);
}

TEST_CASE("mc variance: direct spot values") {
  const std::vector<std::vector<double>> samples{{1.0}, {2.0}, {3.0}};
  const auto var = mc_variance(samples);
  CHECK(var[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const std::vector<std::vector<double>> same{{0.7, -1.0}, {0.7, -1.0}, {0.7, -1.0}};
  const auto zero = mc_variance(same);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  CHECK_THROWS_AS(mc_variance({{1.0}}), ConfigError);
}

TEST_CASE("mc model variance matches the two-pass oracle to 1e-12") {
  // 20 dropout draws over a Gaussian component field, recorded and replayed
  // through the naive two-pass oracle.
  const int t_samples = 20;
  const double phi = 0.2;
  std::vector<double> base(32);
  std::mt19937_64 field_rng(5);
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (auto& v : base) v = gauss(field_rng);

  std::vector<std::vector<double>> recorded;
  auto sample = [&](std::mt19937_64& rng) {
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = dropout_scale(rng, phi) * base[i];
    recorded.push_back(out);
    return out;
  };
  const auto var = mc_model_variance(sample, t_samples, 777);
  REQUIRE(recorded.size() == t_samples);
  const auto expected = oracles::two_pass_variance(recorded);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(std::abs(var[i] - expected[i]) < 1e-12);

  CHECK_THROWS_AS(mc_model_variance(sample, 1, 777), ConfigError);
}

TEST_CASE("observe: benign frame has baseline confidence and zero path bias") {
  RoadGeometry road;
  VehicleState st;
  st.speed = 20.0;
  const auto cfg = small_cfg();
  const auto frame = observe(road, st, AttackSpec::none(), cfg, 0);

  CHECK(frame.left_conf == doctest::Approx(0.9));
  CHECK(frame.right_conf == doctest::Approx(0.9));
  CHECK(frame.lr_conf == doctest::Approx(0.81));
  CHECK(frame.left.size() == kLanePointCount);
  CHECK(frame.left.stations.front() == doctest::Approx(0.5));
  CHECK(frame.left.stations.back() == doctest::Approx(96.0));

  // Path bias is an attack-channel effect only.
  AttackSpec attack;
  attack.strength = 0.0;
  const auto frame2 = observe(road, st, attack, cfg, 0);
  for (std::size_t i = 0; i < frame.path.size(); ++i)
    CHECK(frame2.path.offsets[i] == frame.path.offsets[i]);
}

TEST_CASE("observe: disjoint patch window gives a benign frame") {
  RoadGeometry road;
  VehicleState st;  // x = 0, lookahead 96 m
  AttackSpec attack;
  attack.patch_start = 200.0;
  attack.patch_length = 96.0;
  attack.strength = 1.0;
  const auto cfg = small_cfg();
  const auto frame = observe(road, st, attack, cfg, 3);
  CHECK(frame.left_conf == doctest::Approx(0.9));
  CHECK(frame.lr_conf == doctest::Approx(0.81));
  const auto benign = observe(road, st, AttackSpec::none(), cfg, 3);
  for (std::size_t i = 0; i < frame.path.size(); ++i)
    CHECK(frame.path.offsets[i] == benign.path.offsets[i]);
}

TEST_CASE("observe: saturated attack floors lr_conf and applies full path bias") {
  RoadGeometry road;
  VehicleState st;
  st.x = 40.0;  // window [40, 136] == patch
  AttackSpec attack;
  attack.patch_start = 40.0;
  attack.patch_length = 96.0;
  attack.strength = 1.0;
  attack.conf_floor = 0.1;
  attack.path_bias_gain = 2.0;
  auto cfg = small_cfg();
  cfg.base_noise_sigma = 1e-12;  // isolate the bias
  const auto frame = observe(road, st, attack, cfg, 0);

  CHECK(frame.lr_conf == doctest::Approx(0.1).epsilon(1e-12));
  // Max bias over the window reaches gain * strength at the patch far end.
  double max_bias = 0.0;
  for (std::size_t i = 0; i < frame.path.size(); ++i)
    max_bias = std::max(max_bias, frame.path.offsets[i]);
  CHECK(max_bias == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("observe: lr_conf non-increasing in strength and patch coverage") {
  RoadGeometry road;
  VehicleState st;
  st.x = 10.0;
  auto cfg = small_cfg();

  double prev = 1.0;
  for (double strength : {0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    AttackSpec attack;
    attack.patch_start = 30.0;
    attack.patch_length = 60.0;
    attack.strength = strength;
    const auto frame = observe(road, st, attack, cfg, 0);
    CHECK(frame.lr_conf <= prev + 1e-15);
    prev = frame.lr_conf;
  }

  // Growing the patch toward the ego strictly grows the exposed set.
  prev = 1.0;
  for (double start : {90.0, 70.0, 50.0, 30.0, 10.0}) {
    AttackSpec attack;
    attack.patch_start = start;
    attack.patch_length = 200.0 - start;
    attack.strength = 0.25;
    const auto frame = observe(road, st, attack, cfg, 0);
    CHECK(frame.lr_conf <= prev + 1e-15);
    prev = frame.lr_conf;
  }
}

TEST_CASE("attack response: latched exposure clears only after the hysteresis window") {
  AttackSpec attack;
  attack.patch_start = 40.0;
  attack.patch_length = 96.0;
  attack.strength = 1.0;
  const double look = 96.0;

  // On the patch both are saturated.
  CHECK(attack_response(attack, 60.0, look) == 1.0);
  CHECK(attack_response_latched(attack, 60.0, look) == 1.0);

  // Just past the patch the instantaneous response has collapsed but the
  // latched alarm is still raised; it clears once the window is clear.
  const double x_past = attack.patch_start + attack.patch_length + 5.0;
  CHECK(attack_response(attack, x_past, look) == 0.0);
  CHECK(attack_response_latched(attack, x_past, look) == 1.0);
  CHECK(attack_response_latched(attack, x_past + attack.conf_hysteresis_m + 1.0, look) == 0.0);

  // The path bend follows the instantaneous response: gone right after the
  // patch, while the alarm still holds the speed down.
  CHECK(path_bias(attack, x_past, look) == 0.0);
  CHECK(path_bias(attack, 60.0, look) ==
        doctest::Approx(attack.path_bias_gain).epsilon(1e-12));
}

TEST_CASE("observe: confidence jitters frame to frame during the onset") {
  RoadGeometry road;
  VehicleState st;
  st.x = 25.0;  // mid-cliff for a patch at 40
  AttackSpec attack;
  attack.patch_start = 40.0;
  attack.strength = 1.0;
  auto cfg = small_cfg();
  double lo = 1.0, hi = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto f = observe(road, st, attack, cfg, t);
    lo = std::min(lo, f.lr_conf);
    hi = std::max(hi, f.lr_conf);
  }
  CHECK(hi - lo > 0.01);  // the alarm is noisy where the response is unsaturated
  CHECK(hi < 0.81);       // but never back at the benign level
}

TEST_CASE("observe: sigma_data non-decreasing with station for positive growth") {
  RoadGeometry road;
  VehicleState st;
  auto cfg = small_cfg();
  cfg.noise_growth = 0.02;
  const auto frame = observe(road, st, AttackSpec::none(), cfg, 0);
  for (std::size_t i = 1; i < frame.left_unc.size(); ++i)
    CHECK(frame.left_unc.sigma_data_sq[i] >= frame.left_unc.sigma_data_sq[i - 1]);
}

TEST_CASE("observe: identical (config, seed, tick) reproduce the frame bit-for-bit") {
  RoadGeometry road;
  VehicleState st;
  st.x = 25.0;
  st.y = 0.3;
  AttackSpec attack;
  attack.patch_start = 60.0;
  attack.strength = 0.7;
  const auto cfg = small_cfg();
  const auto a = observe(road, st, attack, cfg, 11);
  const auto b = observe(road, st, attack, cfg, 11);
  CHECK(a.lr_conf == b.lr_conf);
  for (std::size_t i = 0; i < a.left.size(); ++i) {
    CHECK(a.left.offsets[i] == b.left.offsets[i]);
    CHECK(a.path.offsets[i] == b.path.offsets[i]);
    CHECK(a.left_unc.sigma_model_sq[i] == b.left_unc.sigma_model_sq[i]);
  }
  const auto c = observe(road, st, attack, cfg, 12);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.left.size(); ++i)
    any_diff |= a.left.offsets[i] != c.left.offsets[i];
  CHECK(any_diff);
}

TEST_CASE("observe: benign empirical variance matches reported sigma_data_sq within 10%") {
  RoadGeometry road;
  VehicleState st;
  auto cfg = small_cfg();
  cfg.mc_samples = 2;  // keep the loop cheap; data variance is what's probed
  cfg.num_points = 4;
  cfg.station_spacing = 24.0;

  const int reps = 20000;
  std::vector<double> sum_sq(4, 0.0);
  std::vector<double> reported;
  for (int rep = 0; rep < reps; ++rep) {
    const auto frame = observe(road, st, AttackSpec::none(), cfg, rep);
    if (rep == 0)
      reported = frame.left_unc.sigma_data_sq;
    for (std::size_t i = 0; i < 4; ++i) {
      const double err = frame.left.offsets[i] - road.left_line_y(st.x + frame.left.stations[i]);
      sum_sq[i] += err * err;
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double empirical = sum_sq[i] / reps;
    CHECK(empirical == doctest::Approx(reported[i]).epsilon(0.10));
  }
}

TEST_CASE("config validation errors") {
  auto cfg = small_cfg();
  cfg.mc_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.dropout_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  AttackSpec attack;
  attack.patch_length = 0.0;
  CHECK_THROWS_AS(attack.validate(), ConfigError);
  attack = AttackSpec{};
  attack.strength = 1.5;
  CHECK_THROWS_AS(attack.validate(), ConfigError);
}
