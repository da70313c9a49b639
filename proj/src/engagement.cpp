#include "iolguide/engagement.hpp"

#include <cmath>

#include "iolguide/errors.hpp"

namespace iolguide {

Vector6 EngagementState::to_vector() const {
  Vector6 v;
  v << range, los_elevation, los_azimuth, pursuer.speed, pursuer.flight_path,
      pursuer.heading;
  return v;
}

EngagementState EngagementState::from_vector(const Vector6& v) {
  EngagementState x;
  x.range = v(0);
  x.los_elevation = v(1);
  x.los_azimuth = v(2);
  x.pursuer = {v(3), v(4), v(5)};
  return x;
}

AlignmentCache alignment_cache(const EngagementState& x, const DisturbanceState& w) {
  return alignment_cache(x.los_elevation, x.los_azimuth, x.pursuer.flight_path,
                         x.pursuer.heading, w.flight_path, w.heading);
}

LosRates los_rates(const EngagementState& x, const DisturbanceState& w,
                   double theta_guard) {
  if (!(x.range > 0.0)) {
    throw SimError(ErrorKind::kDegenerateGeometry, "range must be positive");
  }
  const double cl = std::cos(x.los_elevation);
  if (std::abs(cl) <= theta_guard) {
    throw SimError(ErrorKind::kLosSingularity, "LOS elevation at the vertical");
  }
  const double sl = std::sin(x.los_elevation);
  const AlignmentCache a = alignment_cache(x, w);
  const double vp = x.pursuer.speed;
  const double ve = w.speed;
  const double tp = x.pursuer.flight_path;
  const double te = w.flight_path;

  LosRates r;
  r.range_rate = ve * (std::sin(te) * sl + cl * a.sigma_e) -
                 vp * (std::sin(tp) * sl + cl * a.sigma_p);
  r.azimuth_rate = (ve * std::cos(te) * std::sin(w.heading - x.los_azimuth) +
                    vp * std::cos(tp) * std::sin(x.los_azimuth - x.pursuer.heading)) /
                   (x.range * cl);
  r.elevation_rate = -(vp * (cl * std::sin(tp) - sl * a.sigma_p) -
                       ve * (cl * std::sin(te) - sl * a.sigma_e)) /
                     x.range;
  return r;
}

Vec3 relative_velocity_from_rates(const EngagementState& x, const LosRates& rates) {
  return {rates.range_rate,
          x.range * rates.azimuth_rate * std::cos(x.los_elevation),
          -x.range * rates.elevation_rate};
}

Vec3 relative_velocity_from_bodies(const EngagementState& x, const DisturbanceState& w) {
  const Vec3 e1 = Vec3::UnitX();
  const Vec3 evader = w.speed * (o3(w.heading).transpose() *
                                 o2(w.flight_path).transpose() * e1);
  const Vec3 pursuer = x.pursuer.speed * (o3(x.pursuer.heading).transpose() *
                                          o2(x.pursuer.flight_path).transpose() * e1);
  return o2(x.los_elevation) * o3(x.los_azimuth) * (evader - pursuer);
}

Vector6 drift_f(const EngagementState& x, const DisturbanceState& w,
                const VehicleParams& pursuer, const Environment& env,
                double theta_guard) {
  const LosRates r = los_rates(x, w, theta_guard);
  if (!(x.pursuer.speed > 0.0)) {
    throw SimError(ErrorKind::kDegenerateGeometry, "pursuer speed must be positive");
  }
  const double tp = x.pursuer.flight_path;
  Vector6 f;
  f(0) = r.range_rate;
  f(1) = r.elevation_rate;
  f(2) = r.azimuth_rate;
  f(3) = -env.gravity * std::sin(tp) +
         (pursuer.axial_thrust - drag_force(pursuer, x.pursuer.speed)) / pursuer.mass;
  f(4) = -env.gravity * std::cos(tp) / x.pursuer.speed;
  f(5) = 0.0;
  return f;
}

ControlMatrix control_matrix_g(const EngagementState& x, double theta_guard) {
  const double ct = std::cos(x.pursuer.flight_path);
  if (std::abs(ct) <= theta_guard) {
    throw SimError(ErrorKind::kHeadingSingularity,
                   "pursuer flight-path angle at the vertical");
  }
  ControlMatrix g = ControlMatrix::Zero();
  g(4, 1) = -1.0 / x.pursuer.speed;
  g(5, 0) = 1.0 / (x.pursuer.speed * ct);
  return g;
}

Vec3 evader_drift(const DisturbanceState& w, const VehicleParams& evader,
                  const ManeuverCommand& cmd, const Environment& env,
                  double theta_guard) {
  const BodyRates r = body_derivatives(w, cmd, evader, env, theta_guard);
  return {r.speed_dot, r.flight_path_dot, r.heading_dot};
}

Vec3 velocity_from_body(const BodyState& body) {
  return body.speed * direction_from_angles(body.flight_path, body.heading);
}

BodyState body_from_velocity(const Vec3& velocity) {
  const LosAngles a = angles_from_vector(velocity);
  return {a.range, a.elevation, a.azimuth};
}

std::pair<EngagementState, DisturbanceState> state_from_cartesian(
    const CartesianPose& pursuer, const CartesianPose& evader) {
  const LosAngles los = los_from_relative_position(evader.position - pursuer.position);
  EngagementState x;
  x.range = los.range;
  x.los_elevation = los.elevation;
  x.los_azimuth = los.azimuth;
  x.pursuer = body_from_velocity(pursuer.velocity);
  return {x, body_from_velocity(evader.velocity)};
}

std::pair<CartesianPose, CartesianPose> cartesian_from_state(
    const EngagementState& x, const DisturbanceState& w, const Vec3& pursuer_position) {
  CartesianPose p{pursuer_position, velocity_from_body(x.pursuer)};
  CartesianPose e{pursuer_position +
                      x.range * direction_from_angles(x.los_elevation, x.los_azimuth),
                  velocity_from_body(w)};
  return {p, e};
}

LosRates cartesian_step_reference(const CartesianPose& pursuer,
                                  const CartesianPose& evader, double dt) {
  const Vec3 rel0 = evader.position - pursuer.position;
  const Vec3 vrel = evader.velocity - pursuer.velocity;
  const LosAngles fwd = los_from_relative_position(rel0 + dt * vrel);
  const LosAngles back = los_from_relative_position(rel0 - dt * vrel);
  LosRates r;
  r.range_rate = (fwd.range - back.range) / (2.0 * dt);
  r.azimuth_rate = wrap_angle(fwd.azimuth - back.azimuth) / (2.0 * dt);
  r.elevation_rate = (fwd.elevation - back.elevation) / (2.0 * dt);
  return r;
}

}  // namespace iolguide
