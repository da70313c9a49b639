#include "iolguide/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace iolguide {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kIntercept: return "intercept";
    case Outcome::kMiss: return "miss";
    case Outcome::kTimeout: return "timeout";
    case Outcome::kSingularity: return "singularity";
    case Outcome::kDivergence: return "divergence";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw SimError(ErrorKind::kConfig, "sim.dt must be > 0");
  if (!(t_max > dt)) throw SimError(ErrorKind::kConfig, "sim.t_max must exceed sim.dt");
  if (!(capture_radius > 0.0)) {
    throw SimError(ErrorKind::kConfig, "sim.capture_radius must be > 0");
  }
  if (!(divergence_factor > 1.0)) {
    throw SimError(ErrorKind::kConfig, "sim.divergence_factor must be > 1");
  }
  if (log_stride == 0) throw SimError(ErrorKind::kConfig, "sim.log_stride must be >= 1");
}

ClosestApproach closest_approach(const std::array<RangeSample, 3>& s) {
  const double t0 = s[0].t;
  const double t1 = s[1].t;
  const double t2 = s[2].t;
  const double q0 = s[0].range * s[0].range;
  const double q1 = s[1].range * s[1].range;
  const double q2 = s[2].range * s[2].range;
  const ClosestApproach fallback{t1, std::max(0.0, s[1].range)};
  if (!(t0 < t1 && t1 < t2)) return fallback;

  // Newton divided differences of R^2.
  const double d01 = (q1 - q0) / (t1 - t0);
  const double d12 = (q2 - q1) / (t2 - t1);
  const double a = (d12 - d01) / (t2 - t0);
  if (!(a > 0.0)) return fallback;  // flat or concave: no interior minimum
  const double b = d01 - a * (t0 + t1);
  double tm = std::clamp(-b / (2.0 * a), t0, t2);
  const double q = q0 + d01 * (tm - t0) + a * (tm - t0) * (tm - t1);
  const double miss = std::sqrt(std::max(0.0, q));
  if (miss > fallback.miss) return fallback;
  return {tm, miss};
}

CombinedState pack_state(const CartesianPose& pursuer, const CartesianPose& evader) {
  // Rejects zero speed and vertical velocities up front.
  velocity_axes(pursuer.velocity);
  velocity_axes(evader.velocity);
  CombinedState s;
  s << pursuer.position, evader.position, pursuer.velocity, evader.velocity;
  return s;
}

BodyState pursuer_body(const CombinedState& s) { return body_from_velocity(s.segment<3>(6)); }
BodyState evader_body(const CombinedState& s) { return body_from_velocity(s.segment<3>(9)); }

CartesianPose pursuer_pose(const CombinedState& s) {
  return {s.segment<3>(0), s.segment<3>(6)};
}

CartesianPose evader_pose(const CombinedState& s) {
  return {s.segment<3>(3), s.segment<3>(9)};
}

EngagementState engagement_view(const CombinedState& s, double /*theta_guard*/) {
  const LosAngles los = los_from_relative_position(s.segment<3>(3) - s.segment<3>(0));
  EngagementState x;
  x.range = los.range;
  x.los_elevation = los.elevation;
  x.los_azimuth = los.azimuth;
  x.pursuer = pursuer_body(s);
  return x;
}

CombinedState combined_derivative(const CombinedState& s, const ManeuverCommand& pursuer_cmd,
                                  const ManeuverCommand& evader_cmd,
                                  const VehicleParams& pursuer, const VehicleParams& evader,
                                  const Environment& env, double theta_guard,
                                  double evader_frame_sign) {
  CombinedState d;
  d << s.segment<3>(6), s.segment<3>(9),
      body_acceleration(s.segment<3>(6), pursuer_cmd, pursuer, env, 1.0, theta_guard),
      body_acceleration(s.segment<3>(9), evader_cmd, evader, env, evader_frame_sign,
                        theta_guard);
  return d;
}

namespace {

// Keeps the evader's command frame continuous: when the lateral axis of the
// canonical velocity frame reverses (the velocity passed near a pole), the
// sign orienting a body-fixed command reverses with it.
double oriented_sign(const Vec3& velocity, const Vec3& reference_j, double reference_sign,
                     double theta_guard) {
  const Vec3 j = velocity_axes(velocity, theta_guard).j;
  return j.dot(reference_j) >= 0.0 ? reference_sign : -reference_sign;
}

ManeuverCommand scaled(const ManeuverCommand& c, double k) { return {k * c.n_y, k * c.n_z}; }

void append_branch(std::vector<BranchRun>& history, Branch b) {
  if (!history.empty() && history.back().branch == b) {
    ++history.back().steps;
  } else {
    history.push_back({b, 1});
  }
}

}  // namespace

TrialRecord run_trial(const TrialSetup& setup, const SimConfig& sim, TrajectoryLog* log) {
  sim.validate();
  TrialRecord rec;
  GuidanceOptions options = setup.options;
  options.theta_guard = sim.theta_guard;
  options.validity_guard = sim.validity_guard;
  GuidanceController controller(setup.law, setup.gains, options, sim.hold_limit);

  CombinedState s;
  try {
    s = pack_state(setup.pursuer, setup.evader);
  } catch (const SimError& e) {
    rec.outcome = Outcome::kSingularity;
    rec.termination_detail = e.what();
    return rec;
  }
  double evader_sign = 1.0;

  const double initial_range = (s.segment<3>(3) - s.segment<3>(0)).norm();
  const double divergence_radius = sim.divergence_factor * initial_range;

  std::array<RangeSample, 3> window{};
  std::array<double, 3> rate_window{};
  std::size_t n_samples = 0;
  double min_range = initial_range;
  double min_range_time = 0.0;
  double min_range_rate = 0.0;

  auto finish = [&](Outcome o, double t, std::string detail) {
    rec.outcome = o;
    rec.end_time = t;
    rec.termination_detail = std::move(detail);
  };

  const auto steps = static_cast<std::size_t>(std::ceil(sim.t_max / sim.dt - 1e-9));
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sim.dt;
    EngagementState x;
    DisturbanceState w;
    LosRates rates;
    GuidanceController::Output g;
    ManeuverCommand evader_cmd;
    Vec3 evader_j;
    try {
      x = engagement_view(s);
      w = evader_body(s);
      evader_j = velocity_axes(s.segment<3>(9), sim.theta_guard).j;
      evader_cmd = scaled(setup.maneuver.at(t), evader_sign);
      std::optional<Vec3> evader_rates;
      if (options.include_evader_feedthrough) {
        evader_rates = evader_drift(w, setup.evader_params, evader_cmd, setup.env,
                                    sim.theta_guard);
      }
      rates = los_rates(x, w, sim.theta_guard);
      g = controller.update(t, x, w, setup.pursuer_params, setup.env, evader_rates);
    } catch (const SimError& e) {
      rec.miss_distance = min_range;
      rec.intercept_time = min_range_time;
      rec.closing_velocity = min_range_rate;
      finish(Outcome::kSingularity, t, e.what());
      return rec;
    }
    append_branch(rec.branch_history, g.command.branch);

    if (log && k % sim.log_stride == 0) {
      TrajectorySample smp;
      smp.t = t;
      smp.pursuer = pursuer_pose(s);
      smp.evader = evader_pose(s);
      smp.x = x;
      smp.w = w;
      smp.y = {rates.azimuth_rate, rates.elevation_rate};
      smp.range_rate = rates.range_rate;
      smp.commanded = g.command.u;
      smp.applied = g.applied;
      smp.validity_margin = g.command.validity_margin;
      smp.branch = g.command.branch;
      smp.held = g.held;
      log->samples.push_back(smp);
    }

    // Closest-approach bookkeeping on the sampled range.
    if (x.range < min_range) {
      min_range = x.range;
      min_range_time = t;
      min_range_rate = rates.range_rate;
    }
    if (n_samples < 3) {
      window[n_samples] = {t, x.range};
      rate_window[n_samples] = rates.range_rate;
      ++n_samples;
    } else {
      window = {window[1], window[2], RangeSample{t, x.range}};
      rate_window = {rate_window[1], rate_window[2], rates.range_rate};
    }
    if (n_samples == 3 && window[1].range < window[0].range &&
        window[2].range > window[1].range) {
      const ClosestApproach ca = closest_approach(window);
      // R' flips sign across t*, so take the last sample on the approach side.
      const std::size_t approach = ca.time >= window[1].t ? 1 : 0;
      rec.intercept_time = ca.time;
      rec.miss_distance = ca.miss;
      rec.closing_velocity = rate_window[approach];
      if (ca.miss < sim.capture_radius) {
        finish(Outcome::kIntercept, t, "captured at closest approach");
      } else {
        finish(Outcome::kMiss, t, "passed closest approach outside capture radius");
      }
      return rec;
    }
    if (x.range > divergence_radius) {
      rec.miss_distance = min_range;
      rec.intercept_time = min_range_time;
      rec.closing_velocity = min_range_rate;
      finish(Outcome::kDivergence, t, "range exceeded divergence radius");
      return rec;
    }
    if (k >= steps) {
      rec.miss_distance = min_range;
      rec.intercept_time = min_range_time;
      rec.closing_velocity = min_range_rate;
      finish(Outcome::kTimeout, t, "reached t_max");
      return rec;
    }

    try {
      if (sim.update == GuidanceUpdate::kZeroOrderHold) {
        const ManeuverCommand u = g.applied;
        const ManeuverCommand ev = setup.maneuver.at(t);
        s = rk4_step(s, sim.dt, [&](const CombinedState& st, double) {
          const double es = oriented_sign(st.segment<3>(9), evader_j, evader_sign,
                                          sim.theta_guard);
          return combined_derivative(st, u, ev, setup.pursuer_params, setup.evader_params,
                                     setup.env, sim.theta_guard, es);
        });
      } else {
        s = rk4_step(s, sim.dt, [&](const CombinedState& st, double tau) {
          const EngagementState xs = engagement_view(st);
          const DisturbanceState ws = evader_body(st);
          const double es = oriented_sign(st.segment<3>(9), evader_j, evader_sign,
                                          sim.theta_guard);
          const ManeuverCommand ecmd = scaled(setup.maneuver.at(t + tau), es);
          std::optional<Vec3> er;
          if (options.include_evader_feedthrough) {
            er = evader_drift(ws, setup.evader_params, ecmd, setup.env, sim.theta_guard);
          }
          const GuidanceCommand c =
              controller.evaluate(xs, ws, setup.pursuer_params, setup.env, er);
          const ManeuverCommand u = saturate(c.u, setup.pursuer_params.accel_limit);
          return combined_derivative(st, u, setup.maneuver.at(t + tau),
                                     setup.pursuer_params, setup.evader_params, setup.env,
                                     sim.theta_guard, es);
        });
      }
    } catch (const SimError& e) {
      rec.miss_distance = min_range;
      rec.intercept_time = min_range_time;
      rec.closing_velocity = min_range_rate;
      finish(Outcome::kSingularity, t, e.what());
      return rec;
    }
    try {
      evader_sign = oriented_sign(s.segment<3>(9), evader_j, evader_sign, sim.theta_guard);
    } catch (const SimError& e) {
      rec.miss_distance = min_range;
      rec.intercept_time = min_range_time;
      rec.closing_velocity = min_range_rate;
      finish(Outcome::kSingularity, t + sim.dt, e.what());
      return rec;
    }
  }
}

}  // namespace iolguide
