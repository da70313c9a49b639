#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "iolguide/engagement.hpp"
#include "iolguide/errors.hpp"
#include "iolguide/guidance.hpp"

namespace iolguide {

enum class Outcome { kIntercept, kMiss, kTimeout, kSingularity, kDivergence };

std::string_view to_string(Outcome outcome);

/// Guidance evaluated once per step and held (digital loop), or evaluated at
/// every integrator stage (continuous-time closed loop, no command hold).
enum class GuidanceUpdate { kZeroOrderHold, kContinuous };

struct SimConfig {
  double dt = 1e-3;              // s
  double t_max = 60.0;           // s
  double capture_radius = 10.0;  // m
  double divergence_factor = 10.0;  // divergence radius = factor * initial range
  double theta_guard = kDefaultThetaGuard;
  double validity_guard = 1e-3;
  double hold_limit = 0.05;      // s
  GuidanceUpdate update = GuidanceUpdate::kZeroOrderHold;
  std::size_t log_stride = 1;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

/// Evader maneuver held constant in its velocity frame from onset_time on.
struct EvaderManeuver {
  double onset_time = std::numeric_limits<double>::infinity();
  ManeuverCommand command;

  ManeuverCommand at(double t) const { return t >= onset_time ? command : ManeuverCommand{}; }
  bool operator==(const EvaderManeuver&) const = default;
};

/// Everything one engagement needs.
struct TrialSetup {
  CartesianPose pursuer;
  CartesianPose evader;
  VehicleParams pursuer_params;
  VehicleParams evader_params;
  Environment env;
  GuidanceLaw law = GuidanceLaw::kCats;
  GuidanceGains gains;
  GuidanceOptions options;
  EvaderManeuver maneuver;
};

struct BranchRun {
  Branch branch = Branch::kNotApplicable;
  std::size_t steps = 0;
  bool operator==(const BranchRun&) const = default;
};

struct TrialRecord {
  double intercept_time = 0.0;    // s, time of closest approach
  double miss_distance = 0.0;     // m
  double closing_velocity = 0.0;  // m/s, R' at the last step before closest approach
  Outcome outcome = Outcome::kTimeout;
  std::uint64_t seed = 0;
  std::vector<BranchRun> branch_history;
  double end_time = 0.0;
  std::string termination_detail;

  bool operator==(const TrialRecord&) const = default;
};

struct TrajectorySample {
  double t = 0.0;
  CartesianPose pursuer;
  CartesianPose evader;
  EngagementState x;
  DisturbanceState w;
  Vector2 y = Vector2::Zero();
  double range_rate = 0.0;
  ManeuverCommand commanded;
  ManeuverCommand applied;
  double validity_margin = 0.0;
  Branch branch = Branch::kNotApplicable;
  bool held = false;
};

struct TrajectoryLog {
  std::vector<TrajectorySample> samples;
};

/// Pursuer position, evader position, pursuer velocity, evader velocity, all
/// in frame A. Integrating velocity vectors keeps the state regular when a
/// vehicle passes near the vertical.
using CombinedState = Eigen::Matrix<double, 12, 1>;

/// Classical fourth-order Runge-Kutta step. Throws
/// SimError(kIntegrationFailure) if any stage derivative is non-finite.
template <typename State, typename Derivative>
State rk4_step(const State& s, double dt, Derivative&& deriv) {
  auto check = [](const State& d) {
    if (!d.allFinite()) {
      throw SimError(ErrorKind::kIntegrationFailure, "non-finite derivative");
    }
    return d;
  };
  const State k1 = check(deriv(s, 0.0));
  const State k2 = check(deriv(State(s + 0.5 * dt * k1), 0.5 * dt));
  const State k3 = check(deriv(State(s + 0.5 * dt * k2), 0.5 * dt));
  const State k4 = check(deriv(State(s + dt * k3), dt));
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct RangeSample {
  double t = 0.0;
  double range = 0.0;
};

struct ClosestApproach {
  double time = 0.0;
  double miss = 0.0;
};

/// Quadratic fit of R^2 through three samples; the minimum of the parabola
/// (clamped to the bracket and to >= 0) gives the refined miss. Falls back to
/// the middle sample when the fit is degenerate.
ClosestApproach closest_approach(const std::array<RangeSample, 3>& samples);

/// Combined-state packing helpers.
CombinedState pack_state(const CartesianPose& pursuer, const CartesianPose& evader);
BodyState pursuer_body(const CombinedState& s);
BodyState evader_body(const CombinedState& s);
CartesianPose pursuer_pose(const CombinedState& s);
CartesianPose evader_pose(const CombinedState& s);

/// Engagement-coordinate view of a combined state.
EngagementState engagement_view(const CombinedState& s,
                                double theta_guard = kDefaultThetaGuard);

/// Time derivative of the combined state for given pursuer and evader
/// velocity-frame commands. evader_frame_sign orients the evader's command
/// frame (see body_acceleration).
CombinedState combined_derivative(const CombinedState& s, const ManeuverCommand& pursuer_cmd,
                                  const ManeuverCommand& evader_cmd,
                                  const VehicleParams& pursuer, const VehicleParams& evader,
                                  const Environment& env,
                                  double theta_guard = kDefaultThetaGuard,
                                  double evader_frame_sign = 1.0);

/// Integrates one engagement to capture, fly-by, divergence, singularity or
/// timeout. Never throws for in-flight failures; they become the outcome.
TrialRecord run_trial(const TrialSetup& setup, const SimConfig& sim,
                      TrajectoryLog* log = nullptr);

}  // namespace iolguide
