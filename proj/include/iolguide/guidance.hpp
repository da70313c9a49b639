#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>

#include "iolguide/engagement.hpp"

namespace iolguide {

using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

enum class GuidanceLaw { kIol, kCats, kPn };
enum class Branch { kStandard, kToggled, kNotApplicable };

/// Which alignment sign gets the plain linearizing law under CATS.
///   kAsPrinted: plain when i_P.i_L < 0, negated when >= 0.
///   kSwapped:   plain when i_P.i_L >= 0, negated when < 0.
enum class CatsBranchOrder { kAsPrinted, kSwapped };

std::string_view to_string(GuidanceLaw law);
std::string_view to_string(Branch branch);
std::string_view to_string(CatsBranchOrder order);
/// Throw SimError(kConfig) on unknown names.
GuidanceLaw guidance_law_from_string(std::string_view name);
CatsBranchOrder cats_order_from_string(std::string_view name);

struct GuidanceGains {
  double k_azimuth_rate = 50.0;    // 1/s
  double k_elevation_rate = 50.0;  // 1/s
  double nav_constant = 3.0;

  void validate() const;
  bool operator==(const GuidanceGains&) const = default;
};

struct GuidanceOptions {
  double validity_guard = 1e-3;  // on |i_P . i_L|
  double theta_guard = kDefaultThetaGuard;
  CatsBranchOrder cats_order = CatsBranchOrder::kSwapped;
  bool include_evader_feedthrough = false;

  bool operator==(const GuidanceOptions&) const = default;
};

struct GuidanceCommand {
  ManeuverCommand u;
  Branch branch = Branch::kNotApplicable;
  double validity_margin = 0.0;  // |i_P . i_L|
};

/// alpha = L_f h and the input gain of the LOS rates in closed form.
///
/// `beta` is the closed-form input matrix of the LOS-frame rate pair
/// (psi_L' cos theta_L, theta_L'); its determinant is -(i_P.i_L)/R^2. The
/// input gain of y = (psi_L', theta_L') itself is diag(1/cos theta_L, 1) beta,
/// which is what the control laws invert.
struct LinearizationTerms {
  Vector2 alpha = Vector2::Zero();
  Matrix2 beta = Matrix2::Zero();
  double beta_det = 0.0;
  Matrix2 beta_inv = Matrix2::Zero();
  double los_cos = 1.0;  // cos(theta_L)
};

/// y = h(x) = (psi_L', theta_L').
Vector2 output_h(const EngagementState& x, const DisturbanceState& w,
                 double theta_guard = kDefaultThetaGuard);

Matrix2 beta_matrix(const EngagementState& x);
double beta_determinant(const EngagementState& x);

/// Closed-form inverse of beta_matrix. Throws ValidityError when
/// |i_P . i_L| <= validity_guard.
Matrix2 beta_inverse(const EngagementState& x, double validity_guard = 1e-3);

/// Exact L_g h for y = (psi_L', theta_L').
Matrix2 output_gain(const EngagementState& x, double theta_guard = kDefaultThetaGuard);

/// L_f h from analytic partials of the LOS-rate equations contracted with
/// drift_f. When `evader_rates` is given, dh/dw W(w) is added.
Vector2 alpha_vector(const EngagementState& x, const DisturbanceState& w,
                     const VehicleParams& pursuer, const Environment& env,
                     const std::optional<Vec3>& evader_rates = std::nullopt,
                     double theta_guard = kDefaultThetaGuard);

/// Jacobian dh/dx (2x6), analytic.
Eigen::Matrix<double, 2, 6> output_jacobian_x(const EngagementState& x,
                                              const DisturbanceState& w,
                                              double theta_guard = kDefaultThetaGuard);
/// Jacobian dh/dw (2x3), analytic.
Eigen::Matrix<double, 2, 3> output_jacobian_w(const EngagementState& x,
                                              const DisturbanceState& w,
                                              double theta_guard = kDefaultThetaGuard);

LinearizationTerms linearization_terms(const EngagementState& x, const DisturbanceState& w,
                                       const VehicleParams& pursuer, const Environment& env,
                                       const GuidanceOptions& options,
                                       const std::optional<Vec3>& evader_rates = std::nullopt);

/// Diagonal first-order target dynamics v = -K y.
Vector2 inner_loop_v(const Vector2& y, const GuidanceGains& gains);

/// u = beta^-1 (-alpha + v). Throws ValidityError below the guard.
GuidanceCommand iol_command(const EngagementState& x, const DisturbanceState& w,
                            const GuidanceGains& gains, const VehicleParams& pursuer,
                            const Environment& env, const GuidanceOptions& options,
                            const std::optional<Vec3>& evader_rates = std::nullopt);

/// IOL with the sign toggle keyed on i_P . i_L. Throws ValidityError below
/// the guard; the hold fallback lives in GuidanceController.
GuidanceCommand cats_command(const EngagementState& x, const DisturbanceState& w,
                             const GuidanceGains& gains, const VehicleParams& pursuer,
                             const Environment& env, const GuidanceOptions& options,
                             const std::optional<Vec3>& evader_rates = std::nullopt);

/// n_y = N V_p psi_L', n_z = -N V_p theta_L' (so that theta_p' tracks
/// +N theta_L' under theta' = -(g cos theta + n_z)/V).
GuidanceCommand pn_command(const EngagementState& x, const DisturbanceState& w,
                           const GuidanceGains& gains,
                           double theta_guard = kDefaultThetaGuard);

/// Per-trial guidance state: law selection, saturation and the short
/// command hold used while i_P . i_L crosses the singular manifold.
class GuidanceController {
 public:
  struct Output {
    GuidanceCommand command;   // before saturation
    ManeuverCommand applied;   // after saturation
    bool held = false;
  };

  GuidanceController(GuidanceLaw law, GuidanceGains gains, GuidanceOptions options,
                     double hold_limit = 0.05);

  /// Holds the last valid command (zero if there is none yet) while the
  /// validity guard is violated; throws ValidityError once the hold has lasted
  /// longer than hold_limit.
  Output update(double t, const EngagementState& x, const DisturbanceState& w,
                const VehicleParams& pursuer, const Environment& env,
                const std::optional<Vec3>& evader_rates = std::nullopt);

  /// Stateless evaluation (no hold); used for continuous-time integration.
  GuidanceCommand evaluate(const EngagementState& x, const DisturbanceState& w,
                           const VehicleParams& pursuer, const Environment& env,
                           const std::optional<Vec3>& evader_rates = std::nullopt) const;

  GuidanceLaw law() const { return law_; }
  const GuidanceOptions& options() const { return options_; }

 private:
  GuidanceLaw law_;
  GuidanceGains gains_;
  GuidanceOptions options_;
  double hold_limit_;
  std::optional<Output> last_valid_;
  std::optional<double> hold_start_;
};

}  // namespace iolguide
