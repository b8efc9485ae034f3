#pragma once

#include <stdexcept>
#include <string>

#include "offload/detection.hpp"
#include "offload/simulator.hpp"

namespace offload {

// Scenario file problem with "file:line: ..." context baked into what().
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedScenario {
  ScenarioConfig config;
  OutcomePolicy outcome_policy;

  friend bool operator==(const LoadedScenario&, const LoadedScenario&) = default;
};

// Sectioned key/value text format; see the bundled scenarios/ files for the
// shape. Unknown keys, missing keys, and invalid values all raise ParseError
// naming the offending line and field.
LoadedScenario load_scenario(const std::string& path);
LoadedScenario parse_scenario(const std::string& text, const std::string& origin);

std::string format_scenario(const LoadedScenario& scenario);
void save_scenario(const LoadedScenario& scenario, const std::string& path);

// Shortest exact decimal round-trip formatting used by every emitter.
std::string fmt_double(double value);

}  // namespace offload
