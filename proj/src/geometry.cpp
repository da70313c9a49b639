#include "iolguide/geometry.hpp"

#include <cmath>

#include "iolguide/errors.hpp"

namespace iolguide {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kLosSingularity: return "los-singularity";
    case ErrorKind::kHeadingSingularity: return "heading-singularity";
    case ErrorKind::kValidityViolation: return "validity-violation";
    case ErrorKind::kIntegrationFailure: return "integration-failure";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kSchema: return "schema";
  }
  return "unknown";
}

Rotation3 o3(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Rotation3 m;
  m << c, s, 0.0,
      -s, c, 0.0,
      0.0, 0.0, 1.0;
  return m;
}

Rotation3 o2(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Rotation3 m;
  m << c, 0.0, -s,
      0.0, 1.0, 0.0,
      s, 0.0, c;
  return m;
}

Vec3 direction_from_angles(double theta, double psi) {
  const double ct = std::cos(theta);
  return {ct * std::cos(psi), ct * std::sin(psi), -std::sin(theta)};
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

LosAngles angles_from_vector(const Vec3& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw SimError(ErrorKind::kDegenerateGeometry,
                   "cannot take angles of a zero-length vector");
  }
  LosAngles out;
  out.range = norm;
  const double horizontal = std::hypot(v.x(), v.y());
  // atan2 keeps precision near the poles where asin would not.
  out.elevation = std::atan2(-v.z(), horizontal);
  out.azimuth = horizontal > 0.0 ? wrap_angle(std::atan2(v.y(), v.x())) : 0.0;
  return out;
}

LosAngles los_from_relative_position(const Vec3& r_rel) {
  return angles_from_vector(r_rel);
}

AlignmentCache alignment_cache(double theta_l, double psi_l, double theta_p,
                               double psi_p, double theta_e, double psi_e) {
  AlignmentCache c;
  c.delta_psi = psi_p - psi_l;
  const double cos_dpsi = std::cos(c.delta_psi);
  c.sigma_p = std::cos(theta_p) * cos_dpsi;
  c.sigma_e = std::cos(theta_e) * std::cos(psi_e - psi_l);
  c.closing_alignment = std::sin(theta_p) * std::sin(theta_l) +
                        std::cos(theta_l) * c.sigma_p;
  return c;
}

}  // namespace iolguide
