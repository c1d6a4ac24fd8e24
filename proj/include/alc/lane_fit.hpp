#pragma once

#include <span>

#include "alc/types.hpp"

namespace alc {

enum class LaneSide { kLeft, kRight };

// Which sigma feeds the fit weights w_i = 1/sigma_i. Data sigma by default;
// total is provided as a switch.
enum class FitWeightSource { kData, kTotal };

// Unweighted least-squares cubic through the points. Needs at least 4 points
// and a full-rank design; rank deficiency is reported, never regularized.
PolyCurve fit_plain_lane(const LanePointSet& points);

// Conservative bounded lane: weighted least-squares cubic on the shifted
// targets mu_i -/+ sigma_total_i (left lane shifts down toward the lane
// center, right lane shifts up), with weights 1/sigma_data_i.
PolyCurve fit_bounded_lane(const LanePointSet& points, const UncertaintyProfile& unc,
                           LaneSide side, FitWeightSource weights = FitWeightSource::kData);

// Weighted least-squares cubic on arbitrary targets; exposed for reuse by the
// bounded fit and the tests.
PolyCurve fit_weighted_cubic(std::span<const double> stations, std::span<const double> targets,
                             std::span<const double> weights);

}  // namespace alc
