#include "iolguide/config.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace iolguide {

namespace {

constexpr double kDeg = kPi / 180.0;

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  if (std::isnan(v)) return ".nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Walks a YAML mapping, remembering the dotted key path for diagnostics and
// rejecting keys nobody asked about.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (!node_.IsMap()) fail(node_, path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& key,
                         const std::string& why) const {
    throw SimError(ErrorKind::kConfig, source_ + ":" + std::to_string(at.Mark().line + 1) +
                                           ": " + key + ": " + why);
  }

  std::string key(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  bool has(const std::string& name) {
    seen_.insert(name);
    return static_cast<bool>(node_[name]);
  }

  YAML::Node get(const std::string& name) {
    seen_.insert(name);
    return node_[name];
  }

  YAML::Node require(const std::string& name) {
    YAML::Node n = get(name);
    if (!n) fail(node_, key(name), "required key is missing");
    return n;
  }

  MapReader child(const std::string& name) { return {get(name), key(name), source_}; }

  double number(const YAML::Node& n, const std::string& name) const {
    try {
      if (!n.IsScalar()) fail(n, key(name), "expected a number");
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, key(name), "expected a number, got '" + n.Scalar() + "'");
    }
  }

  void read(const std::string& name, double& out) {
    if (has(name)) out = number(get(name), name);
  }

  void read(const std::string& name, bool& out) {
    if (!has(name)) return;
    const YAML::Node n = get(name);
    try {
      out = n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, key(name), "expected true or false");
    }
  }

  void read(const std::string& name, std::size_t& out) {
    if (!has(name)) return;
    const YAML::Node n = get(name);
    const double v = number(n, name);
    if (!(v >= 0.0) || v != std::floor(v)) fail(n, key(name), "expected a non-negative integer");
    out = static_cast<std::size_t>(v);
  }

  std::string text(const std::string& name) {
    const YAML::Node n = get(name);
    if (!n.IsScalar()) fail(n, key(name), "expected a string");
    return n.Scalar();
  }

  // Scalar point or [lo, hi].
  void read(const std::string& name, Interval& out) {
    if (!has(name)) return;
    const YAML::Node n = get(name);
    if (n.IsScalar()) {
      out.lo = out.hi = number(n, name);
    } else if (n.IsSequence() && n.size() == 2) {
      out.lo = number(n[0], name);
      out.hi = number(n[1], name);
    } else {
      fail(n, key(name), "expected a number or a [lo, hi] pair");
    }
  }

  // Converts library enum errors into located diagnostics.
  template <typename Fn>
  auto parse_enum(const std::string& name, Fn&& fn) {
    const YAML::Node n = get(name);
    try {
      return fn(text(name));
    } catch (const SimError& e) {
      fail(n, key(name), e.what());
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string k = it->first.Scalar();
      if (!seen_.count(k)) fail(it->first, key(k), "unknown key");
    }
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

void read_vehicle(MapReader r, VehicleParams& p) {
  r.read("mass_kg", p.mass);
  if (r.has("thrust_kN")) {
    double kn = p.axial_thrust / 1e3;
    r.read("thrust_kN", kn);
    p.axial_thrust = kn * 1e3;
  }
  r.read("drag_coefficient", p.drag_coefficient);
  r.read("reference_area_m2", p.reference_area);
  r.read("air_density", p.air_density);
  r.read("accel_limit", p.accel_limit);
  r.finish();
}

void read_ranges(MapReader r, VehicleRanges& v) {
  r.read("speed", v.speed);
  r.read("flight_path_deg", v.flight_path_deg);
  r.read("heading_deg", v.heading_deg);
  r.read("north_km", v.north_km);
  r.read("east_km", v.east_km);
  r.read("altitude_km", v.altitude_km);
  r.finish();
}

void read_side(MapReader r, VehicleParams& params, VehicleRanges& ranges) {
  if (r.has("vehicle")) read_vehicle(r.child("vehicle"), params);
  if (r.has("ranges")) read_ranges(r.child("ranges"), ranges);
  r.finish();
}

VehicleInitialState read_initial_state(MapReader r) {
  VehicleInitialState s;
  s.speed = r.number(r.require("speed"), "speed");
  s.flight_path_deg = r.number(r.require("flight_path_deg"), "flight_path_deg");
  s.heading_deg = r.number(r.require("heading_deg"), "heading_deg");
  s.north_km = r.number(r.require("north_km"), "north_km");
  s.east_km = r.number(r.require("east_km"), "east_km");
  s.altitude_km = r.number(r.require("altitude_km"), "altitude_km");
  r.finish();
  return s;
}

FixedInitialConditions read_fixed(MapReader r) {
  FixedInitialConditions ic;
  r.require("pursuer");
  ic.pursuer = read_initial_state(r.child("pursuer"));
  r.require("evader");
  ic.evader = read_initial_state(r.child("evader"));
  if (r.has("maneuver") && !r.get("maneuver").IsNull()) {
    MapReader m = r.child("maneuver");
    ic.maneuver.onset_time = m.number(m.require("onset_s"), "onset_s");
    m.read("n_y", ic.maneuver.command.n_y);
    m.read("n_z", ic.maneuver.command.n_z);
    m.finish();
  }
  r.finish();
  return ic;
}

void read_sim(MapReader r, SimConfig& sim) {
  r.read("dt", sim.dt);
  r.read("t_max", sim.t_max);
  r.read("capture_radius", sim.capture_radius);
  r.read("divergence_factor", sim.divergence_factor);
  r.read("theta_guard", sim.theta_guard);
  r.read("validity_guard", sim.validity_guard);
  r.read("hold_limit", sim.hold_limit);
  if (r.has("guidance_update")) {
    sim.update = r.parse_enum("guidance_update", [](const std::string& v) {
      if (v == "zero-order-hold") return GuidanceUpdate::kZeroOrderHold;
      if (v == "continuous") return GuidanceUpdate::kContinuous;
      throw SimError(ErrorKind::kConfig, "expected zero-order-hold or continuous");
    });
  }
  r.read("log_stride", sim.log_stride);
  r.finish();
}

std::string_view update_name(GuidanceUpdate u) {
  return u == GuidanceUpdate::kContinuous ? "continuous" : "zero-order-hold";
}

}  // namespace

CartesianPose VehicleInitialState::pose() const {
  return {Vec3(north_km * 1e3, east_km * 1e3, -altitude_km * 1e3),
          speed * direction_from_angles(flight_path_deg * kDeg, heading_deg * kDeg)};
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SimError(ErrorKind::kConfig, source + ":" + std::to_string(e.mark.line + 1) +
                                           ": " + e.msg);
  }
  if (!root || root.IsNull()) {
    throw SimError(ErrorKind::kConfig, source + ":1: <root>: empty configuration");
  }
  MapReader r(root, "", source);

  r.require("case");
  const CaseId id = r.parse_enum("case", case_id_from_string);
  ScenarioConfig cfg;
  cfg.spec = canonical_scenario(id);
  ScenarioSpec& s = cfg.spec;
  if (r.has("name")) s.name = r.text("name");

  r.require("guidance");
  s.guidance = r.parse_enum("guidance", guidance_law_from_string);
  if (r.has("cats_branch_order")) {
    s.options.cats_order = r.parse_enum("cats_branch_order", cats_order_from_string);
  }
  r.read("include_evader_feedthrough", s.options.include_evader_feedthrough);
  if (r.has("stats_scope")) s.stats_scope = r.parse_enum("stats_scope", stats_scope_from_string);

  if (r.has("gains")) {
    MapReader g = r.child("gains");
    g.read("k_azimuth_rate", s.gains.k_azimuth_rate);
    g.read("k_elevation_rate", s.gains.k_elevation_rate);
    g.read("nav_constant", s.gains.nav_constant);
    g.finish();
  }
  if (r.has("pursuer")) read_side(r.child("pursuer"), s.pursuer_params, s.pursuer);
  if (r.has("evader")) read_side(r.child("evader"), s.evader_params, s.evader);
  if (r.has("maneuver")) {
    if (r.get("maneuver").IsNull()) {
      s.maneuver.reset();
    } else {
      MapReader m = r.child("maneuver");
      ManeuverSpec spec = s.maneuver.value_or(ManeuverSpec{});
      m.read("magnitude", spec.magnitude);
      m.read("window_s", spec.window_s);
      m.finish();
      s.maneuver = spec;
    }
  }
  if (r.has("environment")) {
    MapReader e = r.child("environment");
    e.read("gravity", s.env.gravity);
    e.finish();
  }
  if (r.has("sim")) read_sim(r.child("sim"), s.sim);
  if (r.has("initial_conditions") && !r.get("initial_conditions").IsNull()) {
    cfg.initial_conditions = read_fixed(r.child("initial_conditions"));
  }
  r.finish();

  const YAML::Node& croot = root;
  const auto has_ranges = [&](const char* side) {
    return croot[side] && croot[side].IsMap() && croot[side]["ranges"];
  };
  if (id == CaseId::kCustom) {
    if (!cfg.initial_conditions && !(has_ranges("pursuer") && has_ranges("evader"))) {
      r.fail(root, "initial_conditions",
             "case 'custom' needs initial_conditions or both pursuer.ranges and evader.ranges");
    }
    // A fixed-IC scenario samples its own fixed point.
    const auto point = [](const VehicleInitialState& v) {
      return VehicleRanges{{v.speed, v.speed},
                           {v.flight_path_deg, v.flight_path_deg},
                           {v.heading_deg, v.heading_deg},
                           {v.north_km, v.north_km},
                           {v.east_km, v.east_km},
                           {v.altitude_km, v.altitude_km}};
    };
    if (!has_ranges("pursuer")) s.pursuer = point(cfg.initial_conditions->pursuer);
    if (!has_ranges("evader")) s.evader = point(cfg.initial_conditions->evader);
  }

  try {
    s.validate();
  } catch (const SimError& e) {
    throw SimError(ErrorKind::kConfig, source + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SimError(ErrorKind::kConfig, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

namespace {

void emit_number(YAML::Emitter& out, const std::string& key, double v) {
  out << YAML::Key << key << YAML::Value << format_double(v);
}

void emit_interval(YAML::Emitter& out, const std::string& key, const Interval& iv) {
  out << YAML::Key << key << YAML::Value;
  if (iv.lo == iv.hi) {
    out << format_double(iv.lo);
  } else {
    out << YAML::Flow << YAML::BeginSeq << format_double(iv.lo) << format_double(iv.hi)
        << YAML::EndSeq;
  }
}

void emit_side(YAML::Emitter& out, const std::string& key, const VehicleParams& p,
               const VehicleRanges& r) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "vehicle" << YAML::Value << YAML::BeginMap;
  emit_number(out, "mass_kg", p.mass);
  emit_number(out, "thrust_kN", p.axial_thrust / 1e3);
  emit_number(out, "drag_coefficient", p.drag_coefficient);
  emit_number(out, "reference_area_m2", p.reference_area);
  emit_number(out, "air_density", p.air_density);
  emit_number(out, "accel_limit", p.accel_limit);
  out << YAML::EndMap;
  out << YAML::Key << "ranges" << YAML::Value << YAML::BeginMap;
  emit_interval(out, "speed", r.speed);
  emit_interval(out, "flight_path_deg", r.flight_path_deg);
  emit_interval(out, "heading_deg", r.heading_deg);
  emit_interval(out, "north_km", r.north_km);
  emit_interval(out, "east_km", r.east_km);
  emit_interval(out, "altitude_km", r.altitude_km);
  out << YAML::EndMap << YAML::EndMap;
}

void emit_initial_state(YAML::Emitter& out, const std::string& key,
                        const VehicleInitialState& v) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
  emit_number(out, "speed", v.speed);
  emit_number(out, "flight_path_deg", v.flight_path_deg);
  emit_number(out, "heading_deg", v.heading_deg);
  emit_number(out, "north_km", v.north_km);
  emit_number(out, "east_km", v.east_km);
  emit_number(out, "altitude_km", v.altitude_km);
  out << YAML::EndMap;
}

}  // namespace

std::string dump_scenario(const ScenarioConfig& config) {
  const ScenarioSpec& s = config.spec;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "case" << YAML::Value << std::string(to_string(s.case_id));
  out << YAML::Key << "guidance" << YAML::Value << std::string(to_string(s.guidance));
  out << YAML::Key << "cats_branch_order" << YAML::Value
      << std::string(to_string(s.options.cats_order));
  out << YAML::Key << "include_evader_feedthrough" << YAML::Value
      << s.options.include_evader_feedthrough;
  out << YAML::Key << "stats_scope" << YAML::Value << std::string(to_string(s.stats_scope));

  out << YAML::Key << "gains" << YAML::Value << YAML::BeginMap;
  emit_number(out, "k_azimuth_rate", s.gains.k_azimuth_rate);
  emit_number(out, "k_elevation_rate", s.gains.k_elevation_rate);
  emit_number(out, "nav_constant", s.gains.nav_constant);
  out << YAML::EndMap;

  emit_side(out, "pursuer", s.pursuer_params, s.pursuer);
  emit_side(out, "evader", s.evader_params, s.evader);

  out << YAML::Key << "maneuver" << YAML::Value;
  if (s.maneuver) {
    out << YAML::BeginMap;
    emit_number(out, "magnitude", s.maneuver->magnitude);
    emit_interval(out, "window_s", s.maneuver->window_s);
    out << YAML::EndMap;
  } else {
    out << YAML::Null;
  }

  out << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  emit_number(out, "gravity", s.env.gravity);
  out << YAML::EndMap;

  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  emit_number(out, "dt", s.sim.dt);
  emit_number(out, "t_max", s.sim.t_max);
  emit_number(out, "capture_radius", s.sim.capture_radius);
  emit_number(out, "divergence_factor", s.sim.divergence_factor);
  emit_number(out, "theta_guard", s.sim.theta_guard);
  emit_number(out, "validity_guard", s.sim.validity_guard);
  emit_number(out, "hold_limit", s.sim.hold_limit);
  out << YAML::Key << "guidance_update" << YAML::Value << std::string(update_name(s.sim.update));
  out << YAML::Key << "log_stride" << YAML::Value << s.sim.log_stride;
  out << YAML::EndMap;

  if (config.initial_conditions) {
    const FixedInitialConditions& ic = *config.initial_conditions;
    out << YAML::Key << "initial_conditions" << YAML::Value << YAML::BeginMap;
    emit_initial_state(out, "pursuer", ic.pursuer);
    emit_initial_state(out, "evader", ic.evader);
    if (std::isfinite(ic.maneuver.onset_time)) {
      out << YAML::Key << "maneuver" << YAML::Value << YAML::Flow << YAML::BeginMap;
      emit_number(out, "onset_s", ic.maneuver.onset_time);
      emit_number(out, "n_y", ic.maneuver.command.n_y);
      emit_number(out, "n_z", ic.maneuver.command.n_z);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

TrialSetup make_fixed_setup(const ScenarioSpec& spec, const FixedInitialConditions& ic) {
  SampledTrial sample;
  sample.pursuer = ic.pursuer.pose();
  sample.evader = ic.evader.pose();
  sample.maneuver = ic.maneuver;
  return make_trial_setup(spec, sample);
}

}  // namespace iolguide
