#pragma once

#include <iosfwd>
#include <string>

#include "mixclust/harness/scenario.hpp"

namespace mixclust::harness {

// Scenario files are INI-style key/value text:
//
//   [scenario]  name, family, methods, preset (optional base)
//   [model]     layers, nodes, K, p, alpha
//   [sweep]     param, values (comma separated)
//   [run]       replications, seed, threads
//   [init]      c0, rank
//
// Unknown sections or keys are rejected.
ScenarioConfig load_scenario_config(const std::string& path);
ScenarioConfig parse_scenario_config(std::istream& in);

}  // namespace mixclust::harness
