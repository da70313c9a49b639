// sim: single runs, Monte Carlo batches, stats comparison and the
// bistability demo.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "iolguide/config.hpp"
#include "iolguide/report.hpp"

namespace fs = std::filesystem;
using namespace iolguide;

namespace {

constexpr const char* kVersion = IOLGUIDE_VERSION;
constexpr std::uint64_t kFallbackSeed = 1;

// Exit codes. Outcomes map one-to-one onto 0 and 3..6.
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::kIntercept: return 0;
    case Outcome::kMiss: return 3;
    case Outcome::kTimeout: return 4;
    case Outcome::kSingularity: return 5;
    case Outcome::kDivergence: return 6;
  }
  return kExitOther;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SIM_DEFAULT_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw SimError(ErrorKind::kConfig,
                   std::string("SIM_DEFAULT_SEED is not an unsigned integer: '") + env + "'");
  }
  return kFallbackSeed;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError(ErrorKind::kConfig, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

nlohmann::json load_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SimError(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

struct Inputs {
  ScenarioConfig config;
  std::string config_path;
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
};

// Loads the scenario either from a config file or from a manifest written by
// an earlier run.
Inputs resolve_inputs(const std::string& config_path, const std::string& manifest_path,
                      const std::optional<std::uint64_t>& seed_flag) {
  Inputs in;
  if (!manifest_path.empty()) {
    const RunManifest m = manifest_from_json(load_json(manifest_path));
    in.config = parse_scenario(m.scenario_yaml, manifest_path + "#scenario_yaml");
    in.config_path = m.config_path;
    in.seed = m.master_seed;
    in.parameters = m.parameters;
  } else {
    in.config = load_scenario(config_path);
    in.config_path = config_path;
    in.seed = resolve_seed(seed_flag);
  }
  return in;
}

void write_manifest(const fs::path& dir, const std::string& command, const Inputs& in) {
  RunManifest m;
  m.command = command;
  m.config_path = in.config_path;
  m.master_seed = in.seed;
  m.tool_version = kVersion;
  m.timestamp = utc_timestamp();
  m.parameters = in.parameters;
  m.scenario_yaml = dump_scenario(in.config);
  write_json(dir / "manifest.json", manifest_to_json(m));
}

struct RunOptions {
  std::string config;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::string guidance;
  std::size_t trial = 0;
  std::string out_dir = "out";
  bool log_trajectory = false;
};

int cmd_run(const RunOptions& o) {
  Inputs in = resolve_inputs(o.config, o.manifest, o.seed);
  if (o.manifest.empty()) {
    if (!o.guidance.empty()) in.config.spec.guidance = guidance_law_from_string(o.guidance);
    in.parameters = {{"trial", o.trial}, {"log_trajectory", o.log_trajectory}};
  }
  const ScenarioSpec& spec = in.config.spec;
  const std::size_t trial = in.parameters.value("trial", std::size_t{0});
  const bool log_trajectory = in.parameters.value("log_trajectory", false);

  TrialSetup setup;
  std::uint64_t trial_seed_value = 0;
  if (in.config.initial_conditions) {
    setup = make_fixed_setup(spec, *in.config.initial_conditions);
  } else {
    TrialRng rng(in.seed, trial);
    setup = make_trial_setup(spec, sample_initial_conditions(spec, rng));
    trial_seed_value = rng.seed();
  }

  TrajectoryLog log;
  TrialRecord rec = run_trial(setup, spec.sim, log_trajectory ? &log : nullptr);
  rec.seed = trial_seed_value;

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_json(dir / "trial.json", trial_to_json(rec, setup));
  if (log_trajectory) {
    write_with(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, log); });
  }
  write_manifest(dir, "run", in);

  std::cout << to_string(setup.law) << ": " << to_string(rec.outcome)
            << "  miss=" << format_number(rec.miss_distance) << " m"
            << "  t=" << format_number(rec.intercept_time) << " s"
            << "  closing=" << format_number(rec.closing_velocity) << " m/s\n";
  return exit_code(rec.outcome);
}

struct McOptions {
  std::string config;
  std::string case_name;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> guidance;
  std::size_t n = 500;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string stats_scope;
  std::string out_dir = "out";
};

int cmd_mc(const McOptions& o) {
  Inputs in;
  if (!o.case_name.empty()) {
    in.config.spec = canonical_scenario(case_id_from_string(o.case_name));
    in.config_path = "<builtin:" + o.case_name + ">";
    in.seed = resolve_seed(o.seed);
  } else {
    in = resolve_inputs(o.config, o.manifest, o.seed);
  }
  if (o.manifest.empty()) {
    std::vector<std::string> laws = o.guidance;
    if (laws.empty()) laws.push_back(std::string(to_string(in.config.spec.guidance)));
    for (const std::string& l : laws) guidance_law_from_string(l);
    if (!o.stats_scope.empty()) {
      in.config.spec.stats_scope = stats_scope_from_string(o.stats_scope);
    }
    in.parameters = {{"n", o.n}, {"guidance", laws}};
  }
  const std::size_t n = in.parameters.at("n").get<std::size_t>();
  const auto laws = in.parameters.at("guidance").get<std::vector<std::string>>();

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  std::vector<StatsBlock> blocks;
  for (const std::string& law_name : laws) {
    ScenarioSpec spec = in.config.spec;
    spec.guidance = guidance_law_from_string(law_name);
    const BatchResult result = run_batch(spec, n, in.seed, o.jobs);
    StatsBlock block{spec.name, law_name, result.stats};
    write_json(dir / ("stats_" + law_name + ".json"), stats_to_json(block));
    write_with(dir / ("records_" + law_name + ".csv"),
               [&](std::ostream& os) { write_records_csv(os, result.records); });

    std::vector<double> time, miss, vc;
    for (const TrialRecord& r : result.records) {
      if (spec.stats_scope == StatsScope::kSuccessesOnly &&
          !(r.miss_distance < spec.sim.capture_radius)) {
        continue;
      }
      time.push_back(r.intercept_time);
      miss.push_back(r.miss_distance);
      vc.push_back(r.closing_velocity);
    }
    for (const auto& [metric, values] :
         {std::pair{"time", &time}, {"miss", &miss}, {"closing_velocity", &vc}}) {
      write_with(dir / ("ecdf_" + law_name + "_" + metric + ".csv"),
                 [&](std::ostream& os) { write_ecdf_csv(os, ecdf(*values)); });
    }
    const BatchStats& s = result.stats;
    std::cout << spec.name << " " << law_name << ": fail " << format_number(100.0 * s.fail_rate)
              << "% (" << s.n_failures << "/" << s.n_trials << ")  time "
              << format_number(s.time.mean) << " s  miss " << format_number(s.miss.mean)
              << " m  closing " << format_number(s.closing_velocity.mean) << " m/s\n";
    blocks.push_back(block);
  }
  if (blocks.size() == 2) std::cout << '\n' << render_compare_text(blocks[0], blocks[1]);
  write_manifest(dir, "mc", in);
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out_dir) {
  const StatsBlock a = stats_from_json(load_json(a_path));
  const StatsBlock b = stats_from_json(load_json(b_path));
  const std::string table = render_compare_text(a, b);
  std::cout << table;
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text(dir / "compare.txt", table);
    write_with(dir / "compare.csv", [&](std::ostream& os) { write_compare_csv(os, a, b); });
  }
  return 0;
}

int cmd_demo(const std::string& config_path, const std::string& out_dir) {
  Inputs in = resolve_inputs(config_path, "", std::nullopt);
  if (!in.config.initial_conditions) {
    throw SimError(ErrorKind::kConfig,
                   config_path + ": demo-bistability needs an initial_conditions block");
  }
  const FixedInitialConditions& ic = *in.config.initial_conditions;
  const TrialSetup base = make_fixed_setup(in.config.spec, ic);
  const auto [x, w] = state_from_cartesian(base.pursuer, base.evader);
  const double c = alignment_cache(x, w).closing_alignment;
  if (c >= 0.0) {
    std::cerr << "sim: warning: initial i_P.i_L = " << format_number(c)
              << " is not adverse (expected < 0); running anyway\n";
  }
  in.parameters = {{"guidance", {"iol", "cats"}}};

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  for (GuidanceLaw law : {GuidanceLaw::kIol, GuidanceLaw::kCats}) {
    TrialSetup setup = base;
    setup.law = law;
    TrajectoryLog log;
    const TrialRecord rec = run_trial(setup, in.config.spec.sim, &log);
    const std::string name(to_string(law));
    write_with(dir / ("trajectory_" + name + ".csv"),
               [&](std::ostream& os) { write_trajectory_csv(os, log); });
    write_json(dir / ("trial_" + name + ".json"), trial_to_json(rec, setup));
    std::cout << name << ": " << to_string(rec.outcome)
              << "  miss=" << format_number(rec.miss_distance) << " m"
              << "  end=" << format_number(rec.end_time) << " s\n";
  }
  write_manifest(dir, "demo-bistability", in);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pursuer-evader engagement simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one engagement");
  auto* run_cfg = run_cmd->add_option("--config", run.config, "Scenario YAML")->check(CLI::ExistingFile);
  auto* run_man = run_cmd->add_option("--manifest", run.manifest, "Re-run from a manifest.json")
                      ->check(CLI::ExistingFile);
  run_cfg->excludes(run_man);
  run_cmd->add_option("--seed", run.seed, "Master seed (default: $SIM_DEFAULT_SEED or 1)");
  run_cmd->add_option("--guidance", run.guidance, "iol, cats or pn (overrides the config)");
  run_cmd->add_option("--trial", run.trial, "Trial index to sample when no fixed IC is given");
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
  run_cmd->add_flag("--log-trajectory", run.log_trajectory, "Write trajectory.csv");

  McOptions mc;
  auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo batch");
  auto* mc_cfg = mc_cmd->add_option("--config", mc.config, "Scenario YAML")->check(CLI::ExistingFile);
  auto* mc_case = mc_cmd->add_option("--case", mc.case_name, "Built-in case: RA, FA, FAE or RAE");
  auto* mc_man = mc_cmd->add_option("--manifest", mc.manifest, "Re-run from a manifest.json")
                     ->check(CLI::ExistingFile);
  mc_cfg->excludes(mc_case)->excludes(mc_man);
  mc_case->excludes(mc_man);
  mc_cmd->add_option("--n", mc.n, "Trials per guidance law")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", mc.seed, "Master seed (default: $SIM_DEFAULT_SEED or 1)");
  mc_cmd->add_option("--jobs", mc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--guidance", mc.guidance, "Comma-separated laws, e.g. cats,pn")
      ->delimiter(',');
  mc_cmd->add_option("--stats-scope", mc.stats_scope, "all or successes-only");
  mc_cmd->add_option("--out-dir", mc.out_dir, "Output directory");

  std::string cmp_a, cmp_b, cmp_out;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two stats JSON files");
  cmp_cmd->add_option("a", cmp_a, "First stats JSON")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("b", cmp_b, "Second stats JSON")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--out-dir", cmp_out, "Also write compare.txt and compare.csv here");

  std::string demo_cfg, demo_out = "out";
  auto* demo_cmd =
      app.add_subcommand("demo-bistability", "Baseline IOL vs CATS from one adverse IC");
  demo_cmd->add_option("--config", demo_cfg, "Scenario YAML with initial_conditions")
      ->required()
      ->check(CLI::ExistingFile);
  demo_cmd->add_option("--out-dir", demo_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) {
      if (run.config.empty() && run.manifest.empty()) {
        throw SimError(ErrorKind::kConfig, "run: --config or --manifest is required");
      }
      return cmd_run(run);
    }
    if (*mc_cmd) {
      if (mc.config.empty() && mc.case_name.empty() && mc.manifest.empty()) {
        throw SimError(ErrorKind::kConfig, "mc: one of --config, --case or --manifest is required");
      }
      return cmd_mc(mc);
    }
    if (*cmp_cmd) return cmd_compare(cmp_a, cmp_b, cmp_out);
    if (*demo_cmd) return cmd_demo(demo_cfg, demo_out);
  } catch (const SimError& e) {
    std::cerr << "sim: error: " << e.what() << '\n';
    return (e.kind() == ErrorKind::kConfig || e.kind() == ErrorKind::kSchema) ? kExitUsage
                                                                              : kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "sim: error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitUsage;
}
