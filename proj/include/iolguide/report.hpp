#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "iolguide/montecarlo.hpp"

namespace iolguide {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// "standard:120;toggled:7" run-length form of a branch history.
std::string format_branch_history(const std::vector<BranchRun>& history);

/// Trajectory CSV columns, in order. Distances m, speeds m/s, angles deg,
/// LOS rates rad/s, accelerations m/s^2.
const std::vector<std::string>& trajectory_columns();
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);

const std::vector<std::string>& record_columns();
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);

/// "value,fraction" rows.
void write_ecdf_csv(std::ostream& out, const EcdfSeries& series);

nlohmann::json trial_to_json(const TrialRecord& record, const TrialSetup& setup);

/// A labelled stats block as written by `sim mc` and read by `sim compare`.
struct StatsBlock {
  std::string case_name;
  std::string guidance;
  BatchStats stats;
};

nlohmann::json stats_to_json(const StatsBlock& block);
/// Throws SimError(kSchema) naming the first missing or mistyped field.
StatsBlock stats_from_json(const nlohmann::json& j);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t master_seed = 0;
  std::string tool_version;
  std::string timestamp;
  nlohmann::json parameters = nlohmann::json::object();  // n, guidance list, ...
  std::string scenario_yaml;                           // resolved config echo
};

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Side-by-side Time / Miss / Closing Vel. x Avg / Std plus a Fail row, and
/// the B - A differences.
std::string render_compare_text(const StatsBlock& a, const StatsBlock& b);
void write_compare_csv(std::ostream& out, const StatsBlock& a, const StatsBlock& b);

/// UTC "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace iolguide
