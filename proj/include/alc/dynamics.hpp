#pragma once

#include "alc/errors.hpp"
#include "alc/types.hpp"

namespace alc {

struct BicycleParams {
  double wheelbase = 2.7;  // [m]
  double dt = 0.05;        // [s], 20 Hz

  void validate() const {
    if (!(wheelbase > 0.0)) throw ConfigError("BicycleParams: wheelbase must be > 0");
    if (!(dt > 0.0)) throw ConfigError("BicycleParams: dt must be > 0");
  }
};

// Forward-Euler kinematic bicycle step (rear-axle reference):
//   x += v cos(theta) dt,  y += v sin(theta) dt,
//   theta += (v / L) tan(delta) dt,  v = max(0, v + a dt).
VehicleState bicycle_step(const VehicleState& state, double steering, double accel,
                          const BicycleParams& params);

}  // namespace alc
