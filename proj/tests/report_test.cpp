#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "iolguide/report.hpp"

using namespace iolguide;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

std::set<std::string> keys(const nlohmann::json& j) {
  std::set<std::string> out;
  for (const auto& [k, _] : j.items()) out.insert(k);
  return out;
}

// Rear-aspect reference statistics.
StatsBlock table2_ra(bool cats) {
  StatsBlock b;
  b.case_name = "RA";
  b.guidance = cats ? "cats" : "pn";
  BatchStats& s = b.stats;
  s.n_trials = 10000;
  s.seed = 1;
  if (cats) {
    s.time = {11.375, 2.6485};
    s.miss = {1.7034, 30.705};
    s.closing_velocity = {-458.77, 78.972};
    s.fail_rate = 0.003997;
  } else {
    s.time = {12.487, 3.0894};
    s.miss = {17.326, 151.33};
    s.closing_velocity = {-482.48, 93.521};
    s.fail_rate = 0.022982;
  }
  s.n_failures = static_cast<std::size_t>(std::lround(s.fail_rate * 1e4));
  s.n_included = s.n_trials;
  return b;
}

TrialSetup adverse() {
  TrialSetup s;
  s.pursuer = {{0, 0, -5000}, {500, 0, 0}};
  s.evader = {{-3000, 0, -5000}, {0, 200, 0}};
  s.pursuer_params = default_pursuer_params();
  s.evader_params = default_evader_params();
  s.law = GuidanceLaw::kCats;
  return s;
}

}  // namespace

TEST(Report, NumbersRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    ASSERT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-458.77), "-458.77");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Report, BranchHistory) {
  EXPECT_EQ(format_branch_history({{Branch::kStandard, 120}, {Branch::kToggled, 7}}),
            "standard:120;toggled:7");
  EXPECT_EQ(format_branch_history({}), "");
}

TEST(Report, TrajectoryColumnsAreFrozen) {
  EXPECT_EQ(join(trajectory_columns()),
            "t,pursuer_north,pursuer_east,pursuer_altitude,pursuer_speed,"
            "pursuer_flight_path_deg,pursuer_heading_deg,evader_north,evader_east,"
            "evader_altitude,evader_speed,evader_flight_path_deg,evader_heading_deg,range,"
            "los_elevation_deg,los_azimuth_deg,range_rate,psi_l_dot,theta_l_dot,n_y_cmd,"
            "n_z_cmd,n_y,n_z,validity_margin,branch,held");
}

TEST(Report, TrajectoryCsvIsRectangular) {
  SimConfig sim;
  sim.log_stride = 50;
  TrajectoryLog log;
  run_trial(adverse(), sim, &log);
  std::ostringstream os;
  write_trajectory_csv(os, log);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), log.samples.size() + 1);
  EXPECT_EQ(ls[0], join(trajectory_columns()));
  const std::size_t n = trajectory_columns().size();
  const std::size_t branch_col = n - 2;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto cells = split(ls[i]);
    ASSERT_EQ(cells.size(), n) << "row " << i;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == branch_col) {
        ASSERT_TRUE(cells[k] == "standard" || cells[k] == "toggled") << cells[k];
      } else {
        std::size_t used = 0;
        std::stod(cells[k], &used);
        ASSERT_EQ(used, cells[k].size()) << cells[k];
      }
    }
  }
  // Altitude is reported positive up.
  EXPECT_EQ(split(ls[1])[3], "5000");
}

TEST(Report, RecordsCsv) {
  EXPECT_EQ(join(record_columns()),
            "trial,seed,outcome,intercept_time,miss_distance,closing_velocity,end_time,"
            "branch_history");
  TrialRecord r;
  r.intercept_time = 12.5;
  r.miss_distance = 0.25;
  r.closing_velocity = -450;
  r.outcome = Outcome::kIntercept;
  r.seed = 99;
  r.end_time = 12.502;
  r.branch_history = {{Branch::kStandard, 3}};
  std::ostringstream os;
  write_records_csv(os, {r, r});
  EXPECT_EQ(os.str(),
            "trial,seed,outcome,intercept_time,miss_distance,closing_velocity,end_time,"
            "branch_history\n"
            "0,99,intercept,12.5,0.25,-450,12.502,standard:3\n"
            "1,99,intercept,12.5,0.25,-450,12.502,standard:3\n");
}

TEST(Report, EcdfCsv) {
  std::ostringstream os;
  write_ecdf_csv(os, ecdf({2.0, 1.0}));
  EXPECT_EQ(os.str(), "value,fraction\n1,0.5\n2,1\n");
}

TEST(Report, TrialJsonSchema) {
  TrialSetup s = adverse();
  s.maneuver = {1.0, {5.0, 0.0}};
  const TrialRecord r = run_trial(s, SimConfig{});
  const nlohmann::json j = trial_to_json(r, s);
  EXPECT_EQ(keys(j), (std::set<std::string>{"schema", "guidance", "outcome", "intercept_time",
                                            "miss_distance", "closing_velocity", "end_time",
                                            "seed", "termination_detail", "branch_history",
                                            "pursuer_initial", "evader_initial",
                                            "evader_maneuver"}));
  EXPECT_EQ(j["schema"], "iolguide.trial/1");
  EXPECT_EQ(j["outcome"], "intercept");
  EXPECT_EQ(keys(j["pursuer_initial"]),
            (std::set<std::string>{"north", "east", "altitude", "speed", "flight_path_deg",
                                   "heading_deg"}));
  EXPECT_DOUBLE_EQ(j["evader_initial"]["north"].get<double>(), -3000.0);
  EXPECT_DOUBLE_EQ(j["evader_initial"]["heading_deg"].get<double>(), 90.0);
  EXPECT_FALSE(trial_to_json(r, adverse()).contains("evader_maneuver"));
}

TEST(Report, StatsJsonSchemaAndRoundTrip) {
  StatsBlock b = table2_ra(true);
  b.stats.outcome_counts = {9960, 30, 0, 5, 5};
  b.stats.resampled = 2;
  const nlohmann::json j = stats_to_json(b);
  EXPECT_EQ(keys(j), (std::set<std::string>{"schema", "case", "guidance", "seed", "n_trials",
                                            "n_failures", "n_included", "resampled", "scope",
                                            "fail_rate", "fail_percent", "time", "miss",
                                            "closing_velocity", "outcomes"}));
  EXPECT_EQ(j["schema"], "iolguide.stats/1");
  EXPECT_EQ(keys(j["outcomes"]), (std::set<std::string>{"intercept", "miss", "timeout",
                                                        "singularity", "divergence"}));
  EXPECT_DOUBLE_EQ(j["fail_percent"].get<double>(), 0.3997);

  const StatsBlock back = stats_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(stats_to_json(back), j);
}

TEST(Report, StatsJsonErrorsNameTheField) {
  auto message = [](const nlohmann::json& j) {
    try {
      stats_from_json(j);
    } catch (const SimError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSchema);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  nlohmann::json j = stats_to_json(table2_ra(true));
  nlohmann::json no_miss = j;
  no_miss.erase("miss");
  EXPECT_NE(message(no_miss).find("'miss'"), std::string::npos);
  nlohmann::json no_std = j;
  no_std["miss"].erase("std");
  EXPECT_NE(message(no_std).find("'miss.std'"), std::string::npos);
  nlohmann::json bad_type = j;
  bad_type["time"]["mean"] = "slow";
  EXPECT_NE(message(bad_type).find("'time.mean'"), std::string::npos);
  nlohmann::json other = j;
  other["schema"] = "something/2";
  EXPECT_NE(message(other).find("schema"), std::string::npos);
}

TEST(Report, ManifestRoundTrip) {
  RunManifest m;
  m.command = "mc";
  m.config_path = "configs/ra.yaml";
  m.master_seed = 42;
  m.tool_version = "0.1.0";
  m.timestamp = "2026-01-02T03:04:05Z";
  m.parameters = {{"n", 500}, {"guidance", {"cats", "pn"}}};
  m.scenario_yaml = "case: RA\nguidance: cats\n";
  const nlohmann::json j = manifest_to_json(m);
  EXPECT_EQ(j["schema"], "iolguide.manifest/1");
  const RunManifest back = manifest_from_json(j);
  EXPECT_EQ(manifest_to_json(back), j);
  nlohmann::json broken = j;
  broken.erase("master_seed");
  EXPECT_THROW(manifest_from_json(broken), SimError);
}

TEST(Report, CompareIdenticalInputsHasZeroDeltas) {
  const StatsBlock a = table2_ra(true);
  std::ostringstream os;
  write_compare_csv(os, a, a);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 10u);
  for (std::size_t i = 3; i < ls.size(); ++i) EXPECT_EQ(split(ls[i]).back(), "0") << ls[i];
}

TEST(Report, CompareCsv) {
  std::ostringstream os;
  write_compare_csv(os, table2_ra(true), table2_ra(false));
  EXPECT_EQ(os.str(),
            "stat,quantity,a,b,delta\n"
            "label,guidance,cats,pn,\n"
            "label,case,RA,RA,\n"
            "avg,time,11.375,12.487,1.112\n"
            "avg,miss,1.7034,17.326,15.6226\n"
            "avg,closing_velocity,-458.77,-482.48,-23.710000000000036\n"
            "std,time,2.6485,3.0894,0.44090000000000007\n"
            "std,miss,30.705,151.33,120.62500000000001\n"
            "std,closing_velocity,78.972,93.521,14.549000000000007\n"
            "fail,percent,0.39969999999999994,2.2982,1.8985\n");
}

TEST(Report, CompareTextReproducesTableLayout) {
  const std::string expected =
      "Metric   |                            cats (RA) |                              pn (RA) |"
      "                        Delta (B - A)\n"
      "         |     Time (s)    Miss (m)    Vc (m/s) |     Time (s)    Miss (m)    Vc (m/s) |"
      "     Time (s)    Miss (m)    Vc (m/s)\n"
      "Avg      |      11.3750      1.7034   -458.7700 |      12.4870     17.3260   -482.4800 |"
      "       1.1120     15.6226    -23.7100\n"
      "Std      |       2.6485     30.7050     78.9720 |       3.0894    151.3300     93.5210 |"
      "       0.4409    120.6250     14.5490\n"
      "Fail     |                              0.3997% |                              2.2982% |"
      "                              1.8985%\n";
  EXPECT_EQ(render_compare_text(table2_ra(true), table2_ra(false)), expected);
}

TEST(Report, Timestamp) {
  EXPECT_TRUE(std::regex_match(utc_timestamp(),
                               std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));
}
