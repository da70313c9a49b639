#include "iolguide/guidance.hpp"

#include <cmath>
#include <string>

#include "iolguide/errors.hpp"

namespace iolguide {

std::string_view to_string(GuidanceLaw law) {
  switch (law) {
    case GuidanceLaw::kIol: return "iol";
    case GuidanceLaw::kCats: return "cats";
    case GuidanceLaw::kPn: return "pn";
  }
  return "unknown";
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::kStandard: return "standard";
    case Branch::kToggled: return "toggled";
    case Branch::kNotApplicable: return "not-applicable";
  }
  return "unknown";
}

std::string_view to_string(CatsBranchOrder order) {
  return order == CatsBranchOrder::kAsPrinted ? "as-printed" : "swapped";
}

GuidanceLaw guidance_law_from_string(std::string_view name) {
  if (name == "iol") return GuidanceLaw::kIol;
  if (name == "cats") return GuidanceLaw::kCats;
  if (name == "pn") return GuidanceLaw::kPn;
  throw SimError(ErrorKind::kConfig,
                 "unknown guidance law '" + std::string(name) + "' (expected iol, cats or pn)");
}

CatsBranchOrder cats_order_from_string(std::string_view name) {
  if (name == "as-printed") return CatsBranchOrder::kAsPrinted;
  if (name == "swapped") return CatsBranchOrder::kSwapped;
  throw SimError(ErrorKind::kConfig, "unknown cats_branch_order '" + std::string(name) +
                                         "' (expected as-printed or swapped)");
}

void GuidanceGains::validate() const {
  if (!(k_azimuth_rate > 0.0) || !(k_elevation_rate > 0.0) || !(nav_constant > 0.0)) {
    throw SimError(ErrorKind::kConfig, "guidance gains must be strictly positive");
  }
}

Vector2 output_h(const EngagementState& x, const DisturbanceState& w, double theta_guard) {
  const LosRates r = los_rates(x, w, theta_guard);
  return {r.azimuth_rate, r.elevation_rate};
}

Matrix2 beta_matrix(const EngagementState& x) {
  if (!(x.range > 0.0)) {
    throw SimError(ErrorKind::kDegenerateGeometry, "range must be positive");
  }
  const double dpsi = x.pursuer.heading - x.los_azimuth;
  const double tp = x.pursuer.flight_path;
  const double tl = x.los_elevation;
  Matrix2 b;
  b << -std::cos(dpsi), -std::sin(tp) * std::sin(dpsi),
      -std::sin(tl) * std::sin(dpsi),
      std::cos(tp) * std::cos(tl) + std::sin(tp) * std::sin(tl) * std::cos(dpsi);
  return b / x.range;
}

double beta_determinant(const EngagementState& x) {
  const double c = alignment_cache(x.los_elevation, x.los_azimuth, x.pursuer.flight_path,
                                   x.pursuer.heading, 0.0, 0.0)
                       .closing_alignment;
  return -c / (x.range * x.range);
}

Matrix2 beta_inverse(const EngagementState& x, double validity_guard) {
  const double dpsi = x.pursuer.heading - x.los_azimuth;
  const double tp = x.pursuer.flight_path;
  const double tl = x.los_elevation;
  const double c = std::sin(tp) * std::sin(tl) + std::cos(tp) * std::cos(tl) * std::cos(dpsi);
  if (std::abs(c) <= validity_guard) {
    throw ValidityError(c, "pursuer velocity orthogonal to the LOS (|i_P.i_L| = " +
                               std::to_string(std::abs(c)) + ")");
  }
  Matrix2 m;
  m << std::cos(tp) * std::cos(tl) + std::sin(tp) * std::sin(tl) * std::cos(dpsi),
      std::sin(tp) * std::sin(dpsi),
      std::sin(tl) * std::sin(dpsi), -std::cos(dpsi);
  // det(beta) = -c / R^2, so the prefactor 1/(R det beta) is -R/c.
  return (-x.range / c) * m;
}

Matrix2 output_gain(const EngagementState& x, double theta_guard) {
  const double cl = std::cos(x.los_elevation);
  if (std::abs(cl) <= theta_guard) {
    throw SimError(ErrorKind::kLosSingularity, "LOS elevation at the vertical");
  }
  Matrix2 b = beta_matrix(x);
  b.row(0) /= cl;
  return b;
}

Eigen::Matrix<double, 2, 6> output_jacobian_x(const EngagementState& x,
                                              const DisturbanceState& w,
                                              double theta_guard) {
  const LosRates r = los_rates(x, w, theta_guard);
  const double R = x.range;
  const double cl = std::cos(x.los_elevation);
  const double sl = std::sin(x.los_elevation);
  const double vp = x.pursuer.speed;
  const double ve = w.speed;
  const double ctp = std::cos(x.pursuer.flight_path);
  const double stp = std::sin(x.pursuer.flight_path);
  const double s_lp = std::sin(x.los_azimuth - x.pursuer.heading);
  const double c_lp = std::cos(x.los_azimuth - x.pursuer.heading);
  const double sigma_p = ctp * c_lp;
  const double sigma_e = std::cos(w.flight_path) * std::cos(w.heading - x.los_azimuth);
  // Numerator of psi_L' (psi_L' = n1 / (R cos theta_L)).
  const double n1 = r.azimuth_rate * R * cl;

  Eigen::Matrix<double, 2, 6> j;
  // d psi_L' / d(R, theta_L, psi_L, V_p, theta_p, psi_p)
  j(0, 0) = -r.azimuth_rate / R;
  j(0, 1) = r.azimuth_rate * sl / cl;
  j(0, 2) = (vp * sigma_p - ve * sigma_e) / (R * cl);
  j(0, 3) = ctp * s_lp / (R * cl);
  j(0, 4) = -vp * stp * s_lp / (R * cl);
  j(0, 5) = -vp * sigma_p / (R * cl);
  // d theta_L' / d(...)
  j(1, 0) = -r.elevation_rate / R;
  j(1, 1) = -r.range_rate / R;
  j(1, 2) = -sl * n1 / R;
  j(1, 3) = -(cl * stp - sl * sigma_p) / R;
  j(1, 4) = -vp * (cl * ctp + sl * stp * c_lp) / R;
  j(1, 5) = vp * sl * ctp * s_lp / R;
  return j;
}

Eigen::Matrix<double, 2, 3> output_jacobian_w(const EngagementState& x,
                                              const DisturbanceState& w,
                                              double theta_guard) {
  const double R = x.range;
  const double cl = std::cos(x.los_elevation);
  if (std::abs(cl) <= theta_guard) {
    throw SimError(ErrorKind::kLosSingularity, "LOS elevation at the vertical");
  }
  const double sl = std::sin(x.los_elevation);
  const double ve = w.speed;
  const double cte = std::cos(w.flight_path);
  const double ste = std::sin(w.flight_path);
  const double s_el = std::sin(w.heading - x.los_azimuth);
  const double c_el = std::cos(w.heading - x.los_azimuth);
  const double sigma_e = cte * c_el;

  Eigen::Matrix<double, 2, 3> j;
  j(0, 0) = cte * s_el / (R * cl);
  j(0, 1) = -ve * ste * s_el / (R * cl);
  j(0, 2) = ve * sigma_e / (R * cl);
  j(1, 0) = (cl * ste - sl * sigma_e) / R;
  j(1, 1) = ve * (cl * cte + sl * ste * c_el) / R;
  j(1, 2) = ve * sl * cte * s_el / R;
  return j;
}

Vector2 alpha_vector(const EngagementState& x, const DisturbanceState& w,
                     const VehicleParams& pursuer, const Environment& env,
                     const std::optional<Vec3>& evader_rates, double theta_guard) {
  Vector2 alpha = output_jacobian_x(x, w, theta_guard) * drift_f(x, w, pursuer, env, theta_guard);
  if (evader_rates) alpha += output_jacobian_w(x, w, theta_guard) * (*evader_rates);
  return alpha;
}

LinearizationTerms linearization_terms(const EngagementState& x, const DisturbanceState& w,
                                       const VehicleParams& pursuer, const Environment& env,
                                       const GuidanceOptions& options,
                                       const std::optional<Vec3>& evader_rates) {
  LinearizationTerms t;
  t.alpha = alpha_vector(x, w, pursuer, env, evader_rates, options.theta_guard);
  t.beta = beta_matrix(x);
  t.beta_det = beta_determinant(x);
  t.beta_inv = beta_inverse(x, options.validity_guard);
  t.los_cos = std::cos(x.los_elevation);
  return t;
}

Vector2 inner_loop_v(const Vector2& y, const GuidanceGains& gains) {
  return {-gains.k_azimuth_rate * y(0), -gains.k_elevation_rate * y(1)};
}

namespace {

// u = (diag(1/cos theta_L, 1) beta)^-1 (-alpha + v)
//   = beta^-1 diag(cos theta_L, 1) (-alpha + v)
Vector2 linearizing_input(const EngagementState& x, const DisturbanceState& w,
                          const GuidanceGains& gains, const VehicleParams& pursuer,
                          const Environment& env, const GuidanceOptions& options,
                          const std::optional<Vec3>& evader_rates) {
  const LinearizationTerms t = linearization_terms(x, w, pursuer, env, options, evader_rates);
  const Vector2 y = output_h(x, w, options.theta_guard);
  Vector2 rhs = -t.alpha + inner_loop_v(y, gains);
  rhs(0) *= t.los_cos;
  return t.beta_inv * rhs;
}

double closing_alignment(const EngagementState& x) {
  return alignment_cache(x.los_elevation, x.los_azimuth, x.pursuer.flight_path,
                         x.pursuer.heading, 0.0, 0.0)
      .closing_alignment;
}

}  // namespace

GuidanceCommand iol_command(const EngagementState& x, const DisturbanceState& w,
                            const GuidanceGains& gains, const VehicleParams& pursuer,
                            const Environment& env, const GuidanceOptions& options,
                            const std::optional<Vec3>& evader_rates) {
  const Vector2 u = linearizing_input(x, w, gains, pursuer, env, options, evader_rates);
  return {{u(0), u(1)}, Branch::kStandard, std::abs(closing_alignment(x))};
}

GuidanceCommand cats_command(const EngagementState& x, const DisturbanceState& w,
                             const GuidanceGains& gains, const VehicleParams& pursuer,
                             const Environment& env, const GuidanceOptions& options,
                             const std::optional<Vec3>& evader_rates) {
  const double c = closing_alignment(x);
  const Vector2 u = linearizing_input(x, w, gains, pursuer, env, options, evader_rates);
  const bool closing = c >= 0.0;
  const bool plain = options.cats_order == CatsBranchOrder::kAsPrinted ? !closing : closing;
  GuidanceCommand cmd;
  cmd.validity_margin = std::abs(c);
  if (plain) {
    cmd.u = {u(0), u(1)};
    cmd.branch = Branch::kStandard;
  } else {
    cmd.u = {-u(0), -u(1)};
    cmd.branch = Branch::kToggled;
  }
  return cmd;
}

GuidanceCommand pn_command(const EngagementState& x, const DisturbanceState& w,
                           const GuidanceGains& gains, double theta_guard) {
  const Vector2 y = output_h(x, w, theta_guard);
  const double scale = gains.nav_constant * x.pursuer.speed;
  return {{scale * y(0), -scale * y(1)}, Branch::kNotApplicable,
          std::abs(closing_alignment(x))};
}

GuidanceController::GuidanceController(GuidanceLaw law, GuidanceGains gains,
                                       GuidanceOptions options, double hold_limit)
    : law_(law), gains_(gains), options_(options), hold_limit_(hold_limit) {}

GuidanceCommand GuidanceController::evaluate(const EngagementState& x,
                                             const DisturbanceState& w,
                                             const VehicleParams& pursuer,
                                             const Environment& env,
                                             const std::optional<Vec3>& evader_rates) const {
  switch (law_) {
    case GuidanceLaw::kIol:
      return iol_command(x, w, gains_, pursuer, env, options_, evader_rates);
    case GuidanceLaw::kCats:
      return cats_command(x, w, gains_, pursuer, env, options_, evader_rates);
    case GuidanceLaw::kPn:
      return pn_command(x, w, gains_, options_.theta_guard);
  }
  return {};
}

GuidanceController::Output GuidanceController::update(
    double t, const EngagementState& x, const DisturbanceState& w,
    const VehicleParams& pursuer, const Environment& env,
    const std::optional<Vec3>& evader_rates) {
  try {
    Output out;
    out.command = evaluate(x, w, pursuer, env, evader_rates);
    out.applied = saturate(out.command.u, pursuer.accel_limit);
    last_valid_ = out;
    hold_start_.reset();
    return out;
  } catch (const ValidityError&) {
    if (!hold_start_) hold_start_ = t;
    if (t - *hold_start_ > hold_limit_) throw;
    // Before any valid evaluation the held command is straight flight.
    Output held = last_valid_.value_or(Output{{{}, Branch::kStandard, 0.0}, {}, false});
    held.held = true;
    held.command.validity_margin = std::abs(closing_alignment(x));
    return held;
  }
}

}  // namespace iolguide
