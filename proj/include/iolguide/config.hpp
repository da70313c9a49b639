#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "iolguide/montecarlo.hpp"

namespace iolguide {

/// One vehicle's initial state in config units (m/s, deg, km).
struct VehicleInitialState {
  double speed = 0.0;
  double flight_path_deg = 0.0;
  double heading_deg = 0.0;
  double north_km = 0.0;
  double east_km = 0.0;
  double altitude_km = 0.0;

  CartesianPose pose() const;
  bool operator==(const VehicleInitialState&) const = default;
};

/// One fixed engagement, used by single runs and the bistability demo.
struct FixedInitialConditions {
  VehicleInitialState pursuer;
  VehicleInitialState evader;
  EvaderManeuver maneuver;

  bool operator==(const FixedInitialConditions&) const = default;
};

/// A scenario file: the Monte Carlo spec plus an optional fixed IC.
struct ScenarioConfig {
  ScenarioSpec spec;
  std::optional<FixedInitialConditions> initial_conditions;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses YAML text. Keys that are not given fall back to the canonical
/// scenario named by `case`. Throws SimError(kConfig) with a message of the
/// form "<source>:<line>: <key>: <reason>".
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Emits every field, so the output parses back to an equal config.
std::string dump_scenario(const ScenarioConfig& config);

TrialSetup make_fixed_setup(const ScenarioSpec& spec, const FixedInitialConditions& ic);

}  // namespace iolguide
