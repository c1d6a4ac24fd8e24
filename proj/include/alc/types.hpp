#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "alc/errors.hpp"

namespace alc {

// Conventions: meters and radians everywhere, degrees only at the CLI
// boundary. Lateral axis y is positive to the LEFT. Longitudinal stations s
// are measured ahead of the ego vehicle.

inline constexpr double kMaxSteerRad = 50.0 * 3.14159265358979323846 / 180.0;
inline constexpr double kMaxHeadingRad = 90.0 * 3.14159265358979323846 / 180.0;
inline constexpr double kPi = 3.14159265358979323846;

// Lane-departure threshold for a highway lane.
inline constexpr double kLaneDepartureMeters = 0.735;

// Number of lane points produced by the perception stand-in per frame.
inline constexpr int kLanePointCount = 192;

struct VehicleState {
  double x = 0.0;        // longitudinal position, world frame [m]
  double y = 0.0;        // lateral position, positive left [m]
  double heading = 0.0;  // [rad], 0 = along road axis
  double speed = 0.0;    // [m/s], >= 0
  double steering = 0.0; // front-wheel angle [rad]
};

// Cubic lateral-offset-vs-longitudinal-distance curve. Coefficients are
// lowest degree first; evaluation is restricted to [s_min, s_max].
class PolyCurve {
 public:
  static constexpr int kDegree = 3;
  static constexpr int kNumCoeffs = kDegree + 1;

  PolyCurve() = default;
  PolyCurve(const std::array<double, kNumCoeffs>& coeffs, double s_min, double s_max)
      : coeffs_(coeffs), s_min_(s_min), s_max_(s_max) {
    if (!(s_min_ <= s_max_)) throw ConfigError("PolyCurve: empty valid range");
  }

  double eval(double s) const {
    check_range(s);
    return eval_unchecked(s);
  }

  // Horner form; no range check (solvers validate the horizon once).
  double eval_unchecked(double s) const {
    return ((coeffs_[3] * s + coeffs_[2]) * s + coeffs_[1]) * s + coeffs_[0];
  }

  // dp/ds at s.
  double deriv(double s) const {
    check_range(s);
    return deriv_unchecked(s);
  }

  double deriv_unchecked(double s) const {
    return (3.0 * coeffs_[3] * s + 2.0 * coeffs_[2]) * s + coeffs_[1];
  }

  bool in_range(double s) const { return s >= s_min_ && s <= s_max_; }

  const std::array<double, kNumCoeffs>& coeffs() const { return coeffs_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }

  // a*P + b*Q, coefficient-wise; valid on the intersection of ranges.
  static PolyCurve affine(double a, const PolyCurve& p, double b, const PolyCurve& q) {
    std::array<double, kNumCoeffs> c{};
    for (int k = 0; k < kNumCoeffs; ++k) c[k] = a * p.coeffs_[k] + b * q.coeffs_[k];
    const double lo = p.s_min_ > q.s_min_ ? p.s_min_ : q.s_min_;
    const double hi = p.s_max_ < q.s_max_ ? p.s_max_ : q.s_max_;
    return PolyCurve(c, lo, hi);
  }

  static PolyCurve constant(double value, double s_min, double s_max) {
    return PolyCurve({value, 0.0, 0.0, 0.0}, s_min, s_max);
  }

 private:
  void check_range(double s) const {
    if (!in_range(s))
      throw RangeError("PolyCurve: s outside valid range");
  }

  std::array<double, kNumCoeffs> coeffs_{};
  double s_min_ = 0.0;
  double s_max_ = 0.0;
};

// Lateral offsets mu_i at strictly increasing longitudinal stations s_i.
struct LanePointSet {
  std::vector<double> stations;  // [m] ahead of ego, strictly increasing, >= 0
  std::vector<double> offsets;   // [m] lateral, positive left

  LanePointSet() = default;
  LanePointSet(std::vector<double> st, std::vector<double> of)
      : stations(std::move(st)), offsets(std::move(of)) {
    validate();
  }

  std::size_t size() const { return stations.size(); }

  void validate() const {
    if (stations.size() != offsets.size())
      throw ShapeError("LanePointSet: stations/offsets size mismatch");
    if (!stations.empty() && stations.front() < 0.0)
      throw DomainError("LanePointSet: first station must be >= 0");
    for (std::size_t i = 1; i < stations.size(); ++i)
      if (!(stations[i] > stations[i - 1]))
        throw DomainError("LanePointSet: stations must be strictly increasing");
  }
};

// Per-point variances [m^2]; total = data + model holds by construction.
struct UncertaintyProfile {
  std::vector<double> sigma_data_sq;
  std::vector<double> sigma_model_sq;
  std::vector<double> sigma_total_sq;

  std::size_t size() const { return sigma_total_sq.size(); }
};

// One perception tick: three point sets, their uncertainties, and the
// detection confidences.
struct PerceptionFrame {
  LanePointSet left;
  LanePointSet right;
  LanePointSet path;
  UncertaintyProfile left_unc;
  UncertaintyProfile right_unc;
  UncertaintyProfile path_unc;
  double left_conf = 0.0;   // [0,1]
  double right_conf = 0.0;  // [0,1]
  double lr_conf = 0.0;     // combined confidence, [0,1]
  int tick = 0;
  double timestamp = 0.0;   // [s]
};

// Ground-truth road: a straight or constant-curvature segment. The modeled
// ego lane is centered on the segment's centerline.
struct RoadGeometry {
  double length = 2000.0;     // [m]
  double lane_width = 3.7;    // [m]
  double curvature = 0.0;     // [1/m]; 0 = straight
  double half_width = 7.4;    // [m] lateral road extent either side of center

  // Centerline lateral position at longitudinal x.
  double center_y(double x) const {
    if (curvature == 0.0) return 0.0;
    return (1.0 - std::cos(curvature * x)) / curvature;
  }

  double left_line_y(double x) const { return center_y(x) + 0.5 * lane_width; }
  double right_line_y(double x) const { return center_y(x) - 0.5 * lane_width; }
};

}  // namespace alc
