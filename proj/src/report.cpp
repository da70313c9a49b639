#include "iolguide/report.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace iolguide {

namespace {

constexpr double kRad2Deg = 180.0 / kPi;
constexpr const char* kStatsSchema = "iolguide.stats/1";
constexpr const char* kManifestSchema = "iolguide.manifest/1";

constexpr std::array<Outcome, 5> kOutcomes{Outcome::kIntercept, Outcome::kMiss,
                                           Outcome::kTimeout, Outcome::kSingularity,
                                           Outcome::kDivergence};

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

const nlohmann::json& field(const nlohmann::json& j, const std::string& name,
                            const std::string& path) {
  if (!j.is_object() || !j.contains(name)) {
    throw SimError(ErrorKind::kSchema, "stats JSON is missing '" + path + name + "'");
  }
  return j.at(name);
}

double number_field(const nlohmann::json& j, const std::string& name, const std::string& path) {
  const nlohmann::json& v = field(j, name, path);
  if (!v.is_number()) {
    throw SimError(ErrorKind::kSchema, "stats JSON field '" + path + name + "' is not a number");
  }
  return v.get<double>();
}

std::size_t count_field(const nlohmann::json& j, const std::string& name,
                        const std::string& path) {
  const nlohmann::json& v = field(j, name, path);
  if (!v.is_number_unsigned()) {
    throw SimError(ErrorKind::kSchema,
                   "stats JSON field '" + path + name + "' is not a non-negative integer");
  }
  return v.get<std::size_t>();
}

MetricStats metric_field(const nlohmann::json& j, const std::string& name) {
  const nlohmann::json& m = field(j, name, "");
  return {number_field(m, "mean", name + "."), number_field(m, "std", name + ".")};
}

nlohmann::json metric_json(const MetricStats& m) { return {{"mean", m.mean}, {"std", m.std}}; }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_branch_history(const std::vector<BranchRun>& history) {
  std::string s;
  for (const BranchRun& run : history) {
    if (!s.empty()) s += ';';
    s += std::string(to_string(run.branch)) + ":" + std::to_string(run.steps);
  }
  return s;
}

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {
      "t",
      "pursuer_north", "pursuer_east", "pursuer_altitude",
      "pursuer_speed", "pursuer_flight_path_deg", "pursuer_heading_deg",
      "evader_north", "evader_east", "evader_altitude",
      "evader_speed", "evader_flight_path_deg", "evader_heading_deg",
      "range", "los_elevation_deg", "los_azimuth_deg", "range_rate",
      "psi_l_dot", "theta_l_dot",
      "n_y_cmd", "n_z_cmd", "n_y", "n_z",
      "validity_margin", "branch", "held"};
  return cols;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  write_row(out, trajectory_columns());
  for (const TrajectorySample& s : log.samples) {
    const BodyState p = body_from_velocity(s.pursuer.velocity);
    const BodyState e = body_from_velocity(s.evader.velocity);
    write_row(out, {format_number(s.t),
                    format_number(s.pursuer.position.x()), format_number(s.pursuer.position.y()),
                    format_number(-s.pursuer.position.z()),
                    format_number(p.speed), format_number(p.flight_path * kRad2Deg),
                    format_number(p.heading * kRad2Deg),
                    format_number(s.evader.position.x()), format_number(s.evader.position.y()),
                    format_number(-s.evader.position.z()),
                    format_number(e.speed), format_number(e.flight_path * kRad2Deg),
                    format_number(e.heading * kRad2Deg),
                    format_number(s.x.range), format_number(s.x.los_elevation * kRad2Deg),
                    format_number(s.x.los_azimuth * kRad2Deg), format_number(s.range_rate),
                    format_number(s.y(0)), format_number(s.y(1)),
                    format_number(s.commanded.n_y), format_number(s.commanded.n_z),
                    format_number(s.applied.n_y), format_number(s.applied.n_z),
                    format_number(s.validity_margin), std::string(to_string(s.branch)),
                    s.held ? "1" : "0"});
  }
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "trial", "seed", "outcome", "intercept_time", "miss_distance",
      "closing_velocity", "end_time", "branch_history"};
  return cols;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  write_row(out, record_columns());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TrialRecord& r = records[i];
    write_row(out, {std::to_string(i), std::to_string(r.seed), std::string(to_string(r.outcome)),
                    format_number(r.intercept_time), format_number(r.miss_distance),
                    format_number(r.closing_velocity), format_number(r.end_time),
                    format_branch_history(r.branch_history)});
  }
}

void write_ecdf_csv(std::ostream& out, const EcdfSeries& series) {
  out << "value,fraction\n";
  for (const EcdfPoint& p : series) {
    out << format_number(p.value) << ',' << format_number(p.fraction) << '\n';
  }
}

nlohmann::json trial_to_json(const TrialRecord& r, const TrialSetup& setup) {
  auto pose = [](const CartesianPose& c) {
    const BodyState b = body_from_velocity(c.velocity);
    return nlohmann::json{{"north", c.position.x()},
                          {"east", c.position.y()},
                          {"altitude", -c.position.z()},
                          {"speed", b.speed},
                          {"flight_path_deg", b.flight_path * kRad2Deg},
                          {"heading_deg", b.heading * kRad2Deg}};
  };
  nlohmann::json branches = nlohmann::json::array();
  for (const BranchRun& b : r.branch_history) {
    branches.push_back({{"branch", std::string(to_string(b.branch))}, {"steps", b.steps}});
  }
  nlohmann::json j = {{"schema", "iolguide.trial/1"},
                      {"guidance", std::string(to_string(setup.law))},
                      {"outcome", std::string(to_string(r.outcome))},
                      {"intercept_time", r.intercept_time},
                      {"miss_distance", r.miss_distance},
                      {"closing_velocity", r.closing_velocity},
                      {"end_time", r.end_time},
                      {"seed", r.seed},
                      {"termination_detail", r.termination_detail},
                      {"branch_history", branches},
                      {"pursuer_initial", pose(setup.pursuer)},
                      {"evader_initial", pose(setup.evader)}};
  if (std::isfinite(setup.maneuver.onset_time)) {
    j["evader_maneuver"] = {{"onset_s", setup.maneuver.onset_time},
                            {"n_y", setup.maneuver.command.n_y},
                            {"n_z", setup.maneuver.command.n_z}};
  }
  return j;
}

nlohmann::json stats_to_json(const StatsBlock& block) {
  const BatchStats& s = block.stats;
  nlohmann::json outcomes = nlohmann::json::object();
  for (Outcome o : kOutcomes) {
    outcomes[std::string(to_string(o))] = s.outcome_counts[static_cast<std::size_t>(o)];
  }
  return {{"schema", kStatsSchema},
          {"case", block.case_name},
          {"guidance", block.guidance},
          {"seed", s.seed},
          {"n_trials", s.n_trials},
          {"n_failures", s.n_failures},
          {"n_included", s.n_included},
          {"resampled", s.resampled},
          {"scope", std::string(to_string(s.scope))},
          {"fail_rate", s.fail_rate},
          {"fail_percent", 100.0 * s.fail_rate},
          {"time", metric_json(s.time)},
          {"miss", metric_json(s.miss)},
          {"closing_velocity", metric_json(s.closing_velocity)},
          {"outcomes", outcomes}};
}

StatsBlock stats_from_json(const nlohmann::json& j) {
  const nlohmann::json& schema = field(j, "schema", "");
  if (schema != kStatsSchema) {
    throw SimError(ErrorKind::kSchema, "unsupported stats schema " + schema.dump());
  }
  StatsBlock b;
  b.case_name = field(j, "case", "").get<std::string>();
  b.guidance = field(j, "guidance", "").get<std::string>();
  BatchStats& s = b.stats;
  s.seed = field(j, "seed", "").get<std::uint64_t>();
  s.n_trials = count_field(j, "n_trials", "");
  s.n_failures = count_field(j, "n_failures", "");
  s.n_included = count_field(j, "n_included", "");
  s.resampled = count_field(j, "resampled", "");
  s.scope = stats_scope_from_string(field(j, "scope", "").get<std::string>());
  s.fail_rate = number_field(j, "fail_rate", "");
  s.time = metric_field(j, "time");
  s.miss = metric_field(j, "miss");
  s.closing_velocity = metric_field(j, "closing_velocity");
  const nlohmann::json& outcomes = field(j, "outcomes", "");
  for (Outcome o : kOutcomes) {
    s.outcome_counts[static_cast<std::size_t>(o)] =
        count_field(outcomes, std::string(to_string(o)), "outcomes.");
  }
  return b;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  return {{"schema", kManifestSchema},
          {"command", m.command},
          {"config_path", m.config_path},
          {"master_seed", m.master_seed},
          {"tool_version", m.tool_version},
          {"timestamp", m.timestamp},
          {"parameters", m.parameters},
          {"scenario_yaml", m.scenario_yaml}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  auto get = [&](const char* name) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(name)) {
      throw SimError(ErrorKind::kSchema, std::string("manifest is missing '") + name + "'");
    }
    return j.at(name);
  };
  if (get("schema") != kManifestSchema) {
    throw SimError(ErrorKind::kSchema, "unsupported manifest schema " + get("schema").dump());
  }
  RunManifest m;
  m.command = get("command").get<std::string>();
  m.config_path = get("config_path").get<std::string>();
  m.master_seed = get("master_seed").get<std::uint64_t>();
  m.tool_version = get("tool_version").get<std::string>();
  m.timestamp = get("timestamp").get<std::string>();
  m.parameters = get("parameters");
  m.scenario_yaml = get("scenario_yaml").get<std::string>();
  return m;
}

namespace {

struct CompareRow {
  std::string stat;
  std::string quantity;
  double a;
  double b;
};

std::vector<CompareRow> compare_rows(const StatsBlock& a, const StatsBlock& b) {
  const BatchStats& x = a.stats;
  const BatchStats& y = b.stats;
  return {{"avg", "time", x.time.mean, y.time.mean},
          {"avg", "miss", x.miss.mean, y.miss.mean},
          {"avg", "closing_velocity", x.closing_velocity.mean, y.closing_velocity.mean},
          {"std", "time", x.time.std, y.time.std},
          {"std", "miss", x.miss.std, y.miss.std},
          {"std", "closing_velocity", x.closing_velocity.std, y.closing_velocity.std},
          {"fail", "percent", 100.0 * x.fail_rate, 100.0 * y.fail_rate}};
}

std::string label(const StatsBlock& s) { return s.guidance + " (" + s.case_name + ")"; }

std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

std::string render_compare_text(const StatsBlock& a, const StatsBlock& b) {
  const std::vector<CompareRow> rows = compare_rows(a, b);
  std::ostringstream os;
  const int w = 12;
  auto cell = [&](const std::string& s) { os << std::setw(w) << s; };
  auto triple = [&](std::size_t first, auto value) {
    for (std::size_t k = 0; k < 3; ++k) cell(fixed(value(rows[first + k]), 4));
  };
  os << std::left << std::setw(8) << "Metric" << std::right;
  os << " | " << std::setw(3 * w) << label(a) << " | " << std::setw(3 * w) << label(b)
     << " | " << std::setw(3 * w) << "Delta (B - A)" << '\n';
  os << std::left << std::setw(8) << "" << std::right << " | ";
  for (int k = 0; k < 3; ++k) {
    cell("Time (s)");
    cell("Miss (m)");
    cell("Vc (m/s)");
    os << (k < 2 ? " | " : "\n");
  }
  for (const auto& [name, first] : {std::pair<const char*, std::size_t>{"Avg", 0}, {"Std", 3}}) {
    os << std::left << std::setw(8) << name << std::right << " | ";
    triple(first, [](const CompareRow& r) { return r.a; });
    os << " | ";
    triple(first, [](const CompareRow& r) { return r.b; });
    os << " | ";
    triple(first, [](const CompareRow& r) { return r.b - r.a; });
    os << '\n';
  }
  const CompareRow& f = rows[6];
  os << std::left << std::setw(8) << "Fail" << std::right << " | " << std::setw(3 * w)
     << (fixed(f.a, 4) + "%") << " | " << std::setw(3 * w) << (fixed(f.b, 4) + "%") << " | "
     << std::setw(3 * w) << (fixed(f.b - f.a, 4) + "%") << '\n';
  return os.str();
}

void write_compare_csv(std::ostream& out, const StatsBlock& a, const StatsBlock& b) {
  out << "stat,quantity,a,b,delta\n";
  out << "label,guidance," << a.guidance << ',' << b.guidance << ",\n";
  out << "label,case," << a.case_name << ',' << b.case_name << ",\n";
  for (const CompareRow& r : compare_rows(a, b)) {
    out << r.stat << ',' << r.quantity << ',' << format_number(r.a) << ','
        << format_number(r.b) << ',' << format_number(r.b - r.a) << '\n';
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace iolguide
