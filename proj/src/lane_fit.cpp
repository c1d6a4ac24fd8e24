#include "alc/lane_fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "alc/errors.hpp"

namespace alc {

namespace {

// Solve min sum_i w_i (p(s_i) - t_i)^2 over cubic p. Stations are mapped to
// [0,1] before building the design matrix (raw powers of ~100 m stations make
// the normal system ill-conditioned), then coefficients are rescaled back.
PolyCurve solve_wls(std::span<const double> stations, std::span<const double> targets,
                    std::span<const double> weights) {
  const auto n = stations.size();
  if (targets.size() != n || weights.size() != n)
    throw ShapeError("fit: stations/targets/weights size mismatch");
  if (n < PolyCurve::kNumCoeffs) throw RankError("fit: needs at least 4 points");

  double scale = 0.0;
  for (auto s : stations) scale = std::max(scale, std::abs(s));
  if (scale == 0.0) throw RankError("fit: all stations zero");

  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), PolyCurve::kNumCoeffs);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw DomainError("fit: weights must be positive and finite");
    const double sw = std::sqrt(weights[i]);
    const double u = stations[i] / scale;
    double pw = 1.0;
    for (int k = 0; k < PolyCurve::kNumCoeffs; ++k) {
      a(static_cast<Eigen::Index>(i), k) = sw * pw;
      pw *= u;
    }
    b(static_cast<Eigen::Index>(i)) = sw * targets[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < PolyCurve::kNumCoeffs)
    throw RankError("fit: rank-deficient design (collinear stations)");
  const Eigen::VectorXd c = qr.solve(b);

  std::array<double, PolyCurve::kNumCoeffs> coeffs{};
  double div = 1.0;
  for (int k = 0; k < PolyCurve::kNumCoeffs; ++k) {
    coeffs[static_cast<std::size_t>(k)] = c(k) / div;
    div *= scale;
  }
  return PolyCurve(coeffs, 0.0, stations[n - 1]);
}

}  // namespace

PolyCurve fit_weighted_cubic(std::span<const double> stations, std::span<const double> targets,
                             std::span<const double> weights) {
  return solve_wls(stations, targets, weights);
}

PolyCurve fit_plain_lane(const LanePointSet& points) {
  std::vector<double> w(points.size(), 1.0);
  return solve_wls(points.stations, points.offsets, w);
}

PolyCurve fit_bounded_lane(const LanePointSet& points, const UncertaintyProfile& unc,
                           LaneSide side, FitWeightSource weight_source) {
  const auto n = points.size();
  if (unc.size() != n) throw ShapeError("fit_bounded_lane: profile/points size mismatch");

  std::vector<double> targets(n), weights(n);
  const double sign = side == LaneSide::kLeft ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double var = weight_source == FitWeightSource::kData ? unc.sigma_data_sq[i]
                                                               : unc.sigma_total_sq[i];
    if (!(var > 0.0)) throw DomainError("fit_bounded_lane: sigma must be > 0");
    weights[i] = 1.0 / std::sqrt(var);
    targets[i] = points.offsets[i] + sign * std::sqrt(unc.sigma_total_sq[i]);
  }
  return solve_wls(points.stations, targets, weights);
}

}  // namespace alc
