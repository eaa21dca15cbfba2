#pragma once

#include <string>

#include "fedgame/core.hpp"

namespace fedgame {

// Scenario files are JSON documents (schema documented in the README and in
// `fedgame --help`). Unknown or ill-typed keys raise InvalidConfig naming the
// key; serialization round-trips losslessly.
ScenarioConfig parse_scenario_json(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& config);

// Short stable hash of the canonical serialization.
std::string scenario_digest(const ScenarioConfig& config);

}  // namespace fedgame
