#include "alc/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace alc {

VehicleState bicycle_step(const VehicleState& state, double steering, double accel,
                          const BicycleParams& params) {
  params.validate();
  VehicleState next = state;
  const double v = state.speed;
  next.x = state.x + v * std::cos(state.heading) * params.dt;
  next.y = state.y + v * std::sin(state.heading) * params.dt;
  next.heading = state.heading + (v / params.wheelbase) * std::tan(steering) * params.dt;
  next.speed = std::max(0.0, v + accel * params.dt);
  next.steering = steering;
  return next;
}

}  // namespace alc
