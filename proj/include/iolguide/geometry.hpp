#pragma once

// Frame conventions.
//
// The inertial frame A has i_A north, j_A east and k_A along local gravity
// (down). A direction is parameterized by an azimuth psi about k_A followed by
// an elevation theta about the intermediate j axis, so positive theta points
// up. The same two-angle parameterization describes the LOS (theta_L, psi_L)
// and each vehicle velocity (flight-path angle theta, heading psi).

#include <Eigen/Dense>

namespace iolguide {

using Vec3 = Eigen::Vector3d;
using Rotation3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Frame rotation about the third axis; row 1 is [cos, sin, 0].
Rotation3 o3(double phi);
/// Frame rotation about the second axis; row 1 is [cos, 0, -sin].
Rotation3 o2(double phi);

/// Unit vector e1' O2(theta) O3(psi) in A-frame components.
Vec3 direction_from_angles(double theta, double psi);

/// Wraps to (-pi, pi].
double wrap_angle(double angle);

struct LosAngles {
  double range = 0.0;      // m
  double elevation = 0.0;  // theta_L, rad, [-pi/2, pi/2]
  double azimuth = 0.0;    // psi_L, rad, (-pi, pi]; 0 at the poles
};

/// Range and LOS angles of a relative position vector. Throws
/// SimError(kDegenerateGeometry) on a zero vector.
LosAngles los_from_relative_position(const Vec3& r_rel);

/// Speed and (theta, psi) of a velocity vector, same conventions as the LOS.
/// Throws SimError(kDegenerateGeometry) on a zero vector.
LosAngles angles_from_vector(const Vec3& v);

struct AlignmentCache {
  double sigma_p = 0.0;            // cos(theta_p) cos(psi_L - psi_p)
  double sigma_e = 0.0;            // cos(theta_e) cos(psi_e - psi_L)
  double delta_psi = 0.0;          // psi_p - psi_L
  double closing_alignment = 0.0;  // i_P . i_L
};

/// Shared trigonometric terms. Inputs are the LOS angles and the pursuer and
/// evader (theta, psi).
AlignmentCache alignment_cache(double theta_l, double psi_l, double theta_p,
                               double psi_p, double theta_e, double psi_e);

}  // namespace iolguide
