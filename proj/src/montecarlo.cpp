#include "iolguide/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace iolguide {

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::kRA: return "RA";
    case CaseId::kFA: return "FA";
    case CaseId::kFAE: return "FAE";
    case CaseId::kRAE: return "RAE";
    case CaseId::kCustom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(StatsScope scope) {
  return scope == StatsScope::kAll ? "all" : "successes-only";
}

CaseId case_id_from_string(std::string_view name) {
  if (name == "RA") return CaseId::kRA;
  if (name == "FA") return CaseId::kFA;
  if (name == "FAE") return CaseId::kFAE;
  if (name == "RAE") return CaseId::kRAE;
  if (name == "custom") return CaseId::kCustom;
  throw SimError(ErrorKind::kConfig, "unknown case '" + std::string(name) +
                                         "' (expected RA, FA, FAE, RAE or custom)");
}

StatsScope stats_scope_from_string(std::string_view name) {
  if (name == "all") return StatsScope::kAll;
  if (name == "successes-only") return StatsScope::kSuccessesOnly;
  throw SimError(ErrorKind::kConfig, "unknown stats scope '" + std::string(name) +
                                         "' (expected all or successes-only)");
}

namespace {

void check_interval(const Interval& iv, const std::string& field) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
    throw SimError(ErrorKind::kConfig, field + ": interval lower bound exceeds upper bound");
  }
}

void check_ranges(const VehicleRanges& r, const std::string& who) {
  check_interval(r.speed, who + ".speed");
  check_interval(r.flight_path_deg, who + ".flight_path_deg");
  check_interval(r.heading_deg, who + ".heading_deg");
  check_interval(r.north_km, who + ".north_km");
  check_interval(r.east_km, who + ".east_km");
  check_interval(r.altitude_km, who + ".altitude_km");
  if (!(r.speed.lo > 0.0)) throw SimError(ErrorKind::kConfig, who + ".speed must be > 0");
  if (r.flight_path_deg.lo <= -90.0 || r.flight_path_deg.hi >= 90.0) {
    throw SimError(ErrorKind::kConfig, who + ".flight_path_deg must lie inside (-90, 90)");
  }
}

constexpr double kDeg = kPi / 180.0;

}  // namespace

void ScenarioSpec::validate() const {
  check_ranges(pursuer, "pursuer");
  check_ranges(evader, "evader");
  if (maneuver) {
    check_interval(maneuver->window_s, "maneuver.window_s");
    if (!(maneuver->magnitude >= 0.0)) {
      throw SimError(ErrorKind::kConfig, "maneuver.magnitude must be >= 0");
    }
  }
  gains.validate();
  pursuer_params.validate();
  evader_params.validate();
  if (!(env.gravity >= 0.0)) throw SimError(ErrorKind::kConfig, "environment.gravity must be >= 0");
  sim.validate();
}

VehicleParams default_pursuer_params() {
  VehicleParams p;
  p.mass = 500.0;
  p.axial_thrust = 15e3;
  p.drag_coefficient = 0.3;
  p.reference_area = 0.2;
  p.air_density = 1.225;
  p.accel_limit = 30.0 * kStandardGravity;
  return p;
}

VehicleParams default_evader_params() {
  VehicleParams p;
  p.mass = 10e3;
  p.axial_thrust = 50e3;
  p.drag_coefficient = 0.5;
  p.reference_area = 1.0;
  p.air_density = 1.225;
  return p;
}

ScenarioSpec canonical_scenario(CaseId id) {
  ScenarioSpec s;
  s.case_id = id;
  s.name = std::string(to_string(id));
  s.pursuer_params = default_pursuer_params();
  s.evader_params = default_evader_params();
  switch (id) {
    case CaseId::kRA:
    case CaseId::kFA:
      s.pursuer = {{400, 600}, {-60, 60}, {-60, 60}, {0, 0}, {0, 0}, {1, 3}};
      s.evader = {{150, 250}, {-60, 60}, {-60, 60}, {2, 4}, {2, 4}, {0, 4}};
      if (id == CaseId::kFA) {
        s.evader.heading_deg = {140, 220};
        s.evader.east_km = {-1, 1};
      }
      break;
    case CaseId::kFAE:
      s.pursuer = {{800, 1100}, {-20, 20}, {-20, 20}, {0, 0}, {0, 0}, {10, 10}};
      s.evader = {{300, 600}, {-15, 15}, {175, 195}, {10, 10}, {-1, 1}, {10, 10}};
      s.maneuver = ManeuverSpec{10.0 * kStandardGravity, {0, 7}};
      break;
    case CaseId::kRAE:
      s.pursuer = {{800, 1100}, {-20, 20}, {-20, 20}, {-10, -10}, {0, 0}, {10, 10}};
      s.evader = {{300, 600}, {-15, 15}, {-20, 20}, {0, 0}, {-1, 1}, {10, 10}};
      s.maneuver = ManeuverSpec{10.0 * kStandardGravity, {0, 25}};
      break;
    case CaseId::kCustom:
      break;
  }
  return s;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  // splitmix64 finalizer over a (seed, index) counter.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master_seed) ^ (trial_index * 0xd1b54a32d192ed03ULL + 1));
}

TrialRng::TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
    : seed_(trial_seed(master_seed, trial_index)), engine_(seed_) {}

double TrialRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double TrialRng::uniform(const Interval& iv) {
  const double u = uniform();
  return iv.lo + (iv.hi - iv.lo) * u;
}

namespace {

CartesianPose sample_pose(const VehicleRanges& r, TrialRng& rng) {
  const double speed = rng.uniform(r.speed);
  const double theta = rng.uniform(r.flight_path_deg) * kDeg;
  const double psi = rng.uniform(r.heading_deg) * kDeg;
  const double north = rng.uniform(r.north_km) * 1e3;
  const double east = rng.uniform(r.east_km) * 1e3;
  const double altitude = rng.uniform(r.altitude_km) * 1e3;
  return {Vec3(north, east, -altitude), speed * direction_from_angles(theta, psi)};
}

}  // namespace

SampledTrial sample_initial_conditions(const ScenarioSpec& spec, TrialRng& rng) {
  SampledTrial out;
  constexpr double kMinSeparation = 1.0;  // m
  constexpr std::size_t kMaxResamples = 1000;
  for (;;) {
    out.pursuer = sample_pose(spec.pursuer, rng);
    out.evader = sample_pose(spec.evader, rng);
    const double onset = rng.uniform(spec.maneuver ? spec.maneuver->window_s : Interval{});
    const double course = 2.0 * kPi * rng.uniform();
    if (spec.maneuver) {
      out.maneuver.onset_time = onset;
      out.maneuver.command = {spec.maneuver->magnitude * std::cos(course),
                              spec.maneuver->magnitude * std::sin(course)};
    } else {
      out.maneuver = EvaderManeuver{};
    }
    if ((out.evader.position - out.pursuer.position).norm() >= kMinSeparation) break;
    if (++out.rejected >= kMaxResamples) {
      throw SimError(ErrorKind::kConfig,
                     "initial-condition ranges keep placing both vehicles within 1 m");
    }
  }
  return out;
}

TrialSetup make_trial_setup(const ScenarioSpec& spec, const SampledTrial& sample) {
  TrialSetup t;
  t.pursuer = sample.pursuer;
  t.evader = sample.evader;
  t.pursuer_params = spec.pursuer_params;
  t.evader_params = spec.evader_params;
  t.env = spec.env;
  t.law = spec.guidance;
  t.gains = spec.gains;
  t.options = spec.options;
  t.maneuver = sample.maneuver;
  return t;
}

BatchResult run_batch(const ScenarioSpec& spec, std::size_t n_trials,
                      std::uint64_t master_seed, std::size_t parallelism) {
  if (n_trials == 0) throw SimError(ErrorKind::kConfig, "n_trials must be >= 1");
  spec.validate();
  BatchResult result;
  result.records.resize(n_trials);
  std::vector<std::size_t> rejected(n_trials, 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1)) {
      TrialRng rng(master_seed, i);
      const SampledTrial sample = sample_initial_conditions(spec, rng);
      rejected[i] = sample.rejected;
      TrialRecord rec = run_trial(make_trial_setup(spec, sample), spec.sim);
      rec.seed = rng.seed();
      result.records[i] = std::move(rec);
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(parallelism, 1, n_trials);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.stats = aggregate(result.records, spec.sim.capture_radius, spec.stats_scope);
  result.stats.seed = master_seed;
  result.stats.resampled = std::accumulate(rejected.begin(), rejected.end(), std::size_t{0});
  return result;
}

namespace {

MetricStats moments(const std::vector<double>& v) {
  MetricStats m;
  const double n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / (n - 1.0));
  }
  return m;
}

}  // namespace

BatchStats aggregate(const std::vector<TrialRecord>& records, double capture_radius,
                     StatsScope scope) {
  if (records.empty()) throw SimError(ErrorKind::kSchema, "cannot aggregate zero records");
  BatchStats st;
  st.scope = scope;
  st.n_trials = records.size();
  std::vector<double> time, miss, vc;
  for (const TrialRecord& r : records) {
    const bool failed = !(r.miss_distance < capture_radius);
    if (failed) ++st.n_failures;
    ++st.outcome_counts[static_cast<std::size_t>(r.outcome)];
    if (scope == StatsScope::kSuccessesOnly && failed) continue;
    time.push_back(r.intercept_time);
    miss.push_back(r.miss_distance);
    vc.push_back(r.closing_velocity);
  }
  st.fail_rate = static_cast<double>(st.n_failures) / static_cast<double>(st.n_trials);
  st.n_included = time.size();
  if (time.empty()) {
    throw SimError(ErrorKind::kSchema, "stats scope leaves no trials to aggregate");
  }
  st.time = moments(time);
  st.miss = moments(miss);
  st.closing_velocity = moments(vc);
  return st;
}

EcdfSeries ecdf(std::vector<double> values) {
  if (values.empty()) throw SimError(ErrorKind::kSchema, "ECDF of an empty sample");
  std::sort(values.begin(), values.end());
  EcdfSeries out;
  out.reserve(values.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

}  // namespace iolguide
