#include "iolguide/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iolguide/errors.hpp"

namespace iolguide {

namespace {

void require(bool ok, const char* field, const char* bound) {
  if (!ok) {
    throw SimError(ErrorKind::kConfig,
                   std::string("vehicle parameter '") + field + "' must be " + bound);
  }
}

}  // namespace

void VehicleParams::validate() const {
  require(mass > 0.0 && std::isfinite(mass), "mass", "> 0");
  require(axial_thrust >= 0.0 && std::isfinite(axial_thrust), "thrust", ">= 0");
  require(drag_coefficient >= 0.0, "drag_coefficient", ">= 0");
  require(reference_area >= 0.0, "reference_area", ">= 0");
  require(air_density >= 0.0, "air_density", ">= 0");
  require(accel_limit > 0.0, "accel_limit", "> 0");
}

double drag_force(const VehicleParams& params, double speed) {
  return 0.5 * params.air_density * params.drag_coefficient *
         params.reference_area * speed * speed;
}

BodyRates body_derivatives(const BodyState& state, const ManeuverCommand& cmd,
                           const VehicleParams& params, const Environment& env,
                           double theta_guard) {
  const double v = state.speed;
  if (!(v > 0.0)) {
    throw SimError(ErrorKind::kDegenerateGeometry, "vehicle speed must stay positive");
  }
  const double ct = std::cos(state.flight_path);
  if (std::abs(ct) <= theta_guard) {
    throw SimError(ErrorKind::kHeadingSingularity,
                   "flight-path angle at the vertical; heading rate undefined");
  }
  const double st = std::sin(state.flight_path);
  BodyRates r;
  r.speed_dot = -env.gravity * st +
                (params.axial_thrust - drag_force(params, v)) / params.mass;
  r.flight_path_dot = -(env.gravity * ct + cmd.n_z) / v;
  r.heading_dot = cmd.n_y / (v * ct);
  return r;
}

VelocityAxes velocity_axes(const Vec3& velocity, double theta_guard) {
  const double v = velocity.norm();
  if (!(v > 0.0)) {
    throw SimError(ErrorKind::kDegenerateGeometry, "vehicle speed must stay positive");
  }
  const double horizontal = std::hypot(velocity.x(), velocity.y());
  if (horizontal <= theta_guard * v) {
    throw SimError(ErrorKind::kHeadingSingularity,
                   "flight-path angle at the vertical; heading rate undefined");
  }
  VelocityAxes a;
  a.i = velocity / v;
  a.j = Vec3(-velocity.y(), velocity.x(), 0.0) / horizontal;
  a.k = a.i.cross(a.j);
  return a;
}

Vec3 body_acceleration(const Vec3& velocity, const ManeuverCommand& cmd,
                       const VehicleParams& params, const Environment& env,
                       double frame_sign, double theta_guard) {
  const VelocityAxes a = velocity_axes(velocity, theta_guard);
  const double axial =
      (params.axial_thrust - drag_force(params, velocity.norm())) / params.mass;
  return axial * a.i + frame_sign * (cmd.n_y * a.j + cmd.n_z * a.k) +
         Vec3(0.0, 0.0, env.gravity);
}

ManeuverCommand saturate(const ManeuverCommand& cmd, double limit) {
  if (!std::isfinite(limit)) return cmd;
  return {std::clamp(cmd.n_y, -limit, limit), std::clamp(cmd.n_z, -limit, limit)};
}

}  // namespace iolguide
