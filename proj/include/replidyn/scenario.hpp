#pragma once

// Scenario files: a JSON document naming the game parameters (directly or
// via economic primitives), initial conditions, integrator overrides and
// requested outputs.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "replidyn/game_model.hpp"
#include "replidyn/integrate.hpp"

namespace replidyn {

struct ScenarioFile {
  std::string name;
  GameParams params;
  std::optional<EconomicPrimitives> primitives;
  std::vector<PopulationState> initial_conditions;
  IntegratorOptions integrator;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;  // e.g. direct markups overriding primitives
};

// Accepted top-level keys: name, u1, u2, u3, u4, psi, mu, primitives,
// initial_conditions, integrator, outputs. Unknown keys are rejected with
// the offending key named. Throws ScenarioParseError on malformed JSON and
// ScenarioValidationError when the parameters violate the ordering
// assumptions or an initial condition leaves the unit square.
ScenarioFile parse_scenario(const std::string& text);

ScenarioFile load_scenario(const std::filesystem::path& path);

// Canonical JSON rendering; parse(serialize(s)) reproduces the semantic
// content of s exactly.
std::string serialize_scenario(const ScenarioFile& scenario);

}  // namespace replidyn
