#pragma once

#include <stdexcept>
#include <string>

namespace alc {

// Invalid configuration value (e.g. too few Monte-Carlo samples).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Mathematical domain violation (e.g. non-positive variance).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Mismatched container sizes between paired inputs.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation outside a curve's valid range.
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Singular or rank-deficient least-squares system.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fusion weights that sum to zero.
struct DegenerateWeightsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// MPC horizon extends past the reference curves.
struct HorizonRangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace alc
