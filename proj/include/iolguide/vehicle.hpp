#pragma once

#include <limits>

#include "iolguide/geometry.hpp"

namespace iolguide {

inline constexpr double kStandardGravity = 9.80665;
inline constexpr double kDefaultThetaGuard = 1e-6;

struct VehicleParams {
  double mass = 500.0;             // kg
  double axial_thrust = 0.0;       // N, along the velocity vector
  double drag_coefficient = 0.0;   // quadratic drag C_d
  double reference_area = 0.0;     // m^2
  double air_density = 1.225;      // kg/m^3
  double accel_limit = std::numeric_limits<double>::infinity();  // m/s^2, per channel

  /// Throws SimError(kConfig) naming the first violated bound.
  void validate() const;
  bool operator==(const VehicleParams&) const = default;
};

struct BodyState {
  double speed = 0.0;        // V, m/s
  double flight_path = 0.0;  // theta, rad
  double heading = 0.0;      // psi, rad
};

/// Specific accelerations along the velocity-frame j (lateral) and k
/// (vertical, positive down) axes.
struct ManeuverCommand {
  double n_y = 0.0;
  double n_z = 0.0;

  bool operator==(const ManeuverCommand&) const = default;
};

struct Environment {
  double gravity = kStandardGravity;

  bool operator==(const Environment&) const = default;
};

struct BodyRates {
  double speed_dot = 0.0;
  double flight_path_dot = 0.0;
  double heading_dot = 0.0;
};

/// D = 0.5 rho C_d A V^2.
double drag_force(const VehicleParams& params, double speed);

/// Point-mass translational dynamics shared by pursuer and evader:
///   V'     = -g sin(theta) + (T - D)/m
///   theta' = -(g cos(theta) + n_z)/V
///   psi'   =  n_y/(V cos(theta))
/// Throws SimError(kHeadingSingularity) when |cos theta| <= theta_guard and
/// SimError(kDegenerateGeometry) when V <= 0.
BodyRates body_derivatives(const BodyState& state, const ManeuverCommand& cmd,
                           const VehicleParams& params, const Environment& env,
                           double theta_guard = kDefaultThetaGuard);

/// Velocity-frame axes in frame A: i along the velocity, j horizontal, k
/// completing the right-handed triad (down in level flight).
struct VelocityAxes {
  Vec3 i;
  Vec3 j;
  Vec3 k;
};

/// Throws SimError(kDegenerateGeometry) at zero speed and
/// SimError(kHeadingSingularity) when |cos theta| <= theta_guard.
VelocityAxes velocity_axes(const Vec3& velocity, double theta_guard = kDefaultThetaGuard);

/// The same dynamics as body_derivatives written as an inertial acceleration:
///   (T - D)/m i + s (n_y j + n_z k) + g k_A
/// where s = frame_sign. s = -1 is the velocity frame with j and k reversed,
/// which is what a body-fixed command sees after the velocity passes a pole.
Vec3 body_acceleration(const Vec3& velocity, const ManeuverCommand& cmd,
                       const VehicleParams& params, const Environment& env,
                       double frame_sign = 1.0, double theta_guard = kDefaultThetaGuard);

/// Per-channel clamp to +/- limit. An infinite limit is a no-op.
ManeuverCommand saturate(const ManeuverCommand& cmd, double limit);

}  // namespace iolguide
