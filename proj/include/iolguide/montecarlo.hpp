#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "iolguide/simulation.hpp"

namespace iolguide {

/// Scenario families: rear aspect, front aspect, and their maneuvering-evader
/// variants. kCustom covers hand-built scenarios such as fixed-IC demos.
enum class CaseId { kRA, kFA, kFAE, kRAE, kCustom };

enum class StatsScope { kAll, kSuccessesOnly };

std::string_view to_string(CaseId id);
std::string_view to_string(StatsScope scope);
CaseId case_id_from_string(std::string_view name);
StatsScope stats_scope_from_string(std::string_view name);

/// Closed interval; lo == hi is a point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

/// Initial-condition ranges in table units: m/s, deg, km.
struct VehicleRanges {
  Interval speed;
  Interval flight_path_deg;
  Interval heading_deg;
  Interval north_km;
  Interval east_km;
  Interval altitude_km;

  bool operator==(const VehicleRanges&) const = default;
};

struct ManeuverSpec {
  double magnitude = 10.0 * kStandardGravity;  // m/s^2
  Interval window_s;                           // onset time range

  bool operator==(const ManeuverSpec&) const = default;
};

struct ScenarioSpec {
  std::string name;
  CaseId case_id = CaseId::kCustom;
  VehicleRanges pursuer;
  VehicleRanges evader;
  std::optional<ManeuverSpec> maneuver;
  GuidanceLaw guidance = GuidanceLaw::kCats;
  GuidanceGains gains;
  GuidanceOptions options;
  VehicleParams pursuer_params;
  VehicleParams evader_params;
  Environment env;
  SimConfig sim;
  StatsScope stats_scope = StatsScope::kAll;

  /// Throws SimError(kConfig) naming the offending field.
  void validate() const;
  bool operator==(const ScenarioSpec&) const = default;
};

/// Built-in transcription of the four canonical scenario families with the
/// default vehicle models.
ScenarioSpec canonical_scenario(CaseId id);
VehicleParams default_pursuer_params();
VehicleParams default_evader_params();

/// Per-trial random stream derived only from (master seed, trial index).
class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index);

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on the interval; a point interval still consumes one draw.
  double uniform(const Interval& iv);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

struct SampledTrial {
  CartesianPose pursuer;
  CartesianPose evader;
  EvaderManeuver maneuver;
  std::size_t rejected = 0;  // geometry resamples
};

SampledTrial sample_initial_conditions(const ScenarioSpec& spec, TrialRng& rng);

TrialSetup make_trial_setup(const ScenarioSpec& spec, const SampledTrial& sample);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
};

struct BatchStats {
  MetricStats time;
  MetricStats miss;
  MetricStats closing_velocity;
  double fail_rate = 0.0;  // fraction with miss >= capture radius
  std::size_t n_trials = 0;
  std::size_t n_failures = 0;
  std::size_t n_included = 0;  // trials entering mean/std under the scope
  std::size_t resampled = 0;
  std::array<std::size_t, 5> outcome_counts{};  // indexed by Outcome
  std::uint64_t seed = 0;
  StatsScope scope = StatsScope::kAll;
};

struct BatchResult {
  BatchStats stats;
  std::vector<TrialRecord> records;  // ordered by trial index
};

/// Runs n trials on up to `parallelism` threads. Trial i always uses the
/// stream TrialRng(master_seed, i), so results do not depend on parallelism.
BatchResult run_batch(const ScenarioSpec& spec, std::size_t n_trials,
                      std::uint64_t master_seed, std::size_t parallelism);

/// Mean, sample std (n-1) and failure fraction. Throws SimError(kSchema) on
/// empty input, or when the scope leaves no trials.
BatchStats aggregate(const std::vector<TrialRecord>& records, double capture_radius,
                     StatsScope scope = StatsScope::kAll);

struct EcdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};
using EcdfSeries = std::vector<EcdfPoint>;

/// Step function with fraction i/n at the i-th sorted value. Throws
/// SimError(kSchema) on empty input.
EcdfSeries ecdf(std::vector<double> values);

}  // namespace iolguide
