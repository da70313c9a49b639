#pragma once

#include <Eigen/Dense>
#include <utility>

#include "iolguide/geometry.hpp"
#include "iolguide/vehicle.hpp"

namespace iolguide {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using ControlMatrix = Eigen::Matrix<double, 6, 2>;

/// x = [R, theta_L, psi_L, V_p, theta_p, psi_p].
struct EngagementState {
  double range = 0.0;
  double los_elevation = 0.0;
  double los_azimuth = 0.0;
  BodyState pursuer;

  Vector6 to_vector() const;
  static EngagementState from_vector(const Vector6& v);
};

/// w = [V_e, theta_e, psi_e]; the evader is an exogenous input.
using DisturbanceState = BodyState;

struct LosRates {
  double range_rate = 0.0;      // R'
  double azimuth_rate = 0.0;    // psi_L'
  double elevation_rate = 0.0;  // theta_L'
};

/// Position in A-frame components (north, east, down) and inertial velocity.
struct CartesianPose {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  bool operator==(const CartesianPose&) const = default;
};

AlignmentCache alignment_cache(const EngagementState& x, const DisturbanceState& w);

/// Scalar range and LOS-angle kinematics. Throws SimError(kLosSingularity)
/// when |cos theta_L| <= theta_guard, SimError(kDegenerateGeometry) when R <= 0.
LosRates los_rates(const EngagementState& x, const DisturbanceState& w,
                   double theta_guard = kDefaultThetaGuard);

/// Relative velocity v_e/p in LOS-frame components built from the LOS rates:
/// [R', R psi_L' cos(theta_L), -R theta_L'].
Vec3 relative_velocity_from_rates(const EngagementState& x, const LosRates& rates);

/// The same relative velocity built by rotating V_e i_E - V_p i_P into the
/// LOS frame.
Vec3 relative_velocity_from_bodies(const EngagementState& x, const DisturbanceState& w);

/// Drift f(x, w) of x' = f(x, w) + g(x) u.
Vector6 drift_f(const EngagementState& x, const DisturbanceState& w,
                const VehicleParams& pursuer, const Environment& env,
                double theta_guard = kDefaultThetaGuard);

/// Input matrix g(x); u = [n_y, n_z]. Throws SimError(kHeadingSingularity)
/// when |cos theta_p| <= theta_guard.
ControlMatrix control_matrix_g(const EngagementState& x,
                               double theta_guard = kDefaultThetaGuard);

/// Evader exosystem W(w) with the evader's maneuver command.
Vec3 evader_drift(const DisturbanceState& w, const VehicleParams& evader,
                  const ManeuverCommand& cmd, const Environment& env,
                  double theta_guard = kDefaultThetaGuard);

Vec3 velocity_from_body(const BodyState& body);
/// Throws SimError(kDegenerateGeometry) on zero velocity.
BodyState body_from_velocity(const Vec3& velocity);

/// Engagement coordinates from Cartesian poses. Throws
/// SimError(kDegenerateGeometry) on coincident positions or zero velocity.
std::pair<EngagementState, DisturbanceState> state_from_cartesian(
    const CartesianPose& pursuer, const CartesianPose& evader);

/// Inverse of state_from_cartesian, with the pursuer at `pursuer_position`.
std::pair<CartesianPose, CartesianPose> cartesian_from_state(
    const EngagementState& x, const DisturbanceState& w,
    const Vec3& pursuer_position = Vec3::Zero());

/// Central-difference estimate of (R', psi_L', theta_L') from propagating both
/// vehicles in straight lines for +/- dt. Test oracle for los_rates.
LosRates cartesian_step_reference(const CartesianPose& pursuer,
                                  const CartesianPose& evader, double dt);

}  // namespace iolguide
