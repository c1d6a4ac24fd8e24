#pragma once

#include <string>

#include "alc/harness.hpp"

namespace alc {

// Loads a key-sectioned YAML scenario file. Missing sections and keys keep
// their defaults; unknown keys are rejected.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& yaml_text);

}  // namespace alc
