#include <gtest/gtest.h>

#include "iolguide/guidance.hpp"
#include "iolguide/simulation.hpp"
#include "test_support.hpp"

using namespace iolguide;
using iolguide::testing::StateGen;

namespace {

EngagementState make_x(double R, double tl, double pl, double vp, double tp, double pp) {
  EngagementState x;
  x.range = R;
  x.los_elevation = tl;
  x.los_azimuth = pl;
  x.pursuer = {vp, tp, pp};
  return x;
}

double margin(const EngagementState& x) {
  return std::abs(alignment_cache(x, {1.0, 0.0, 0.0}).closing_alignment);
}

EngagementState valid_state(StateGen& gen, double min_margin = 1e-3) {
  for (;;) {
    const EngagementState x = gen.engagement();
    if (margin(x) > min_margin) return x;
  }
}

VehicleParams pursuer_params() {
  VehicleParams p;
  p.axial_thrust = 15e3;
  p.drag_coefficient = 0.3;
  p.reference_area = 0.2;
  return p;
}

// Central difference of h along a direction in x, w frozen.
Vector2 dh_along(const EngagementState& x, const DisturbanceState& w, const Vector6& dir,
                 double delta) {
  const Vector2 hp = output_h(EngagementState::from_vector(x.to_vector() + delta * dir), w);
  const Vector2 hm = output_h(EngagementState::from_vector(x.to_vector() - delta * dir), w);
  return (hp - hm) / (2.0 * delta);
}

// Sensitivity of y' to u by differencing h along the columns of g(x).
Matrix2 fd_gain(const EngagementState& x, const DisturbanceState& w) {
  const ControlMatrix g = control_matrix_g(x);
  Matrix2 m;
  for (int j = 0; j < 2; ++j) {
    const double n = g.col(j).norm();
    m.col(j) = n * dh_along(x, w, g.col(j) / n, 1e-6);
  }
  return m;
}

double frob_rel(const Matrix2& a, const Matrix2& b) {
  return (a - b).norm() / std::max(a.norm(), b.norm());
}

// Gravity-free, drag-free, thrust-free pair: the evader flies a straight line.
TrialSetup idealized(const CartesianPose& p, const CartesianPose& e, GuidanceLaw law) {
  TrialSetup s;
  s.pursuer = p;
  s.evader = e;
  s.pursuer_params.mass = 500.0;
  s.evader_params.mass = 10e3;
  s.env.gravity = 0.0;
  s.law = law;
  return s;
}

}  // namespace

TEST(Guidance, BetaExample) {
  const EngagementState x = make_x(2, 0, 0, 300, 0, 0);
  const Matrix2 b = beta_matrix(x);
  EXPECT_NEAR(b(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(b(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(b(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(b(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(beta_determinant(x), -0.25, 1e-15);
  EXPECT_NEAR(b.determinant(), -0.25, 1e-15);
}

TEST(Guidance, BetaInverseExample) {
  const Matrix2 bi = beta_inverse(make_x(2, 0, 0, 300, 0, 0));
  EXPECT_NEAR(bi(0, 0), -2.0, 1e-15);
  EXPECT_NEAR(bi(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(bi(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(bi(1, 1), 2.0, 1e-15);
}

TEST(Guidance, DeterminantIdentity) {
  StateGen gen(31);
  for (int i = 0; i < 10000; ++i) {
    const EngagementState x = gen.engagement();
    const double c = alignment_cache(x, {1, 0, 0}).closing_alignment;
    const double expected = -c / (x.range * x.range);
    ASSERT_NEAR(beta_matrix(x).determinant(), expected, 1e-12);
    ASSERT_NEAR(beta_determinant(x), expected, 1e-12);
  }
}

TEST(Guidance, InverseIsInverse) {
  StateGen gen(32);
  for (int i = 0; i < 10000; ++i) {
    const EngagementState x = valid_state(gen);
    const Matrix2 b = beta_matrix(x);
    const Matrix2 bi = beta_inverse(x);
    ASSERT_LT((b * bi - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_LT(frob_rel(bi, b.inverse()), 1e-9);
  }
}

TEST(Guidance, InverseRejectsNearOrthogonalGeometry) {
  // LOS north, pursuer heading east, tilted so that i_P . i_L = 1e-4.
  const EngagementState x = make_x(1000, 0, 0, 300, 0, kPi / 2 - 1e-4);
  ASSERT_NEAR(margin(x), 1e-4, 1e-10);
  try {
    beta_inverse(x);
    FAIL() << "expected ValidityError";
  } catch (const ValidityError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidityViolation);
    EXPECT_NEAR(e.margin(), 1e-4, 1e-10);
  }
}

TEST(Guidance, OutputIsLosRates) {
  StateGen gen(33);
  for (int i = 0; i < 100; ++i) {
    const EngagementState x = gen.engagement();
    const DisturbanceState w = gen.disturbance();
    const LosRates r = los_rates(x, w);
    const Vector2 y = output_h(x, w);
    ASSERT_EQ(y(0), r.azimuth_rate);
    ASSERT_EQ(y(1), r.elevation_rate);
  }
  EXPECT_TRUE(output_h(make_x(1000, 0, 0, 300, 0, 0), {200, 0, 0}).isZero(0.0));
}

// Relative degree one: y' depends on u at first order through the gain
// diag(1/cos theta_L, 1) beta.
TEST(Guidance, GainMatchesFiniteDifferenceLieDerivative) {
  StateGen gen(34);
  for (int i = 0; i < 1000; ++i) {
    const EngagementState x = gen.engagement();
    const DisturbanceState w = gen.disturbance();
    const Matrix2 fd = fd_gain(x, w);
    ASSERT_LT(frob_rel(output_gain(x), fd), 1e-5);
    Matrix2 scaled = fd;
    scaled.row(0) *= std::cos(x.los_elevation);
    ASSERT_LT(frob_rel(beta_matrix(x), scaled), 1e-5);
  }
}

TEST(Guidance, AlphaMatchesDirectionalDifference) {
  StateGen gen(35);
  const VehicleParams p = pursuer_params();
  const Environment env;
  for (int i = 0; i < 1000; ++i) {
    const EngagementState x = gen.engagement();
    const DisturbanceState w = gen.disturbance();
    const Vector2 a = alpha_vector(x, w, p, env);
    const Vector2 fd = dh_along(x, w, drift_f(x, w, p, env), 1e-6);
    ASSERT_LT((a - fd).norm() / std::max(a.norm(), fd.norm()), 1e-5) << "state " << i;
  }
}

TEST(Guidance, AlphaVanishesAtEquilibrium) {
  VehicleParams p;
  p.drag_coefficient = 0.3;
  p.reference_area = 0.2;
  p.axial_thrust = drag_force(p, 500.0);
  const Vector2 a = alpha_vector(make_x(3000, 0.2, 0.7, 500, 0.2, 0.7), {300, 0.2, 0.7}, p,
                                 Environment{0.0});
  EXPECT_LT(a.norm(), 1e-15);
}

TEST(Guidance, FeedthroughAddsEvaderTerm) {
  StateGen gen(36);
  const EngagementState x = valid_state(gen);
  const DisturbanceState w = gen.disturbance();
  const Vec3 wdot(5.0, 0.01, -0.02);
  const Vector2 base = alpha_vector(x, w, pursuer_params(), {});
  const Vector2 with = alpha_vector(x, w, pursuer_params(), {}, wdot);
  EXPECT_LT((with - base - output_jacobian_w(x, w) * wdot).norm(), 1e-12 * with.norm());
}

TEST(Guidance, InnerLoopIsProportional) {
  const Vector2 v = inner_loop_v({0.1, -0.2}, GuidanceGains{50, 20, 3});
  EXPECT_DOUBLE_EQ(v(0), -5.0);
  EXPECT_DOUBLE_EQ(v(1), 4.0);
}

TEST(Guidance, GainsValidated) {
  EXPECT_THROW((GuidanceGains{0, 50, 3}.validate()), SimError);
  EXPECT_THROW((GuidanceGains{50, -1, 3}.validate()), SimError);
  EXPECT_THROW((GuidanceGains{50, 50, 0}.validate()), SimError);
  EXPECT_NO_THROW(GuidanceGains{}.validate());
}

TEST(Guidance, IolZeroAtRegulatedEquilibrium) {
  const GuidanceCommand c = iol_command(make_x(3000, 0, 0.4, 500, 0, 0.4), {300, 0, 0.4}, {},
                                        VehicleParams{}, Environment{0.0}, {});
  EXPECT_EQ(c.branch, Branch::kStandard);
  EXPECT_NEAR(c.validity_margin, 1.0, 1e-15);
  EXPECT_LT(std::hypot(c.u.n_y, c.u.n_z), 1e-12);
}

TEST(Guidance, IolReconstructsCommandedOutputRate) {
  StateGen gen(37);
  const VehicleParams p = pursuer_params();
  const GuidanceGains k;
  for (int i = 0; i < 1000; ++i) {
    const EngagementState x = valid_state(gen, 0.05);
    const DisturbanceState w = gen.disturbance();
    const GuidanceCommand c = iol_command(x, w, k, p, {}, {});
    const Vector2 ydot =
        alpha_vector(x, w, p, {}) + output_gain(x) * Vector2(c.u.n_y, c.u.n_z);
    const Vector2 v = inner_loop_v(output_h(x, w), k);
    ASSERT_LT((ydot - v).norm(), 1e-9 * std::max(1.0, v.norm()));
  }
}

TEST(Guidance, IolCancelsGravityInCollinearGeometry) {
  const double tp = 0.3;
  const GuidanceCommand c = iol_command(make_x(3000, tp, 0.0, 500, tp, 0.0), {300, tp, 0.0}, {},
                                        VehicleParams{}, {}, {});
  EXPECT_NEAR(c.u.n_y, 0.0, 1e-12);
  EXPECT_NEAR(c.u.n_z, -kStandardGravity * std::cos(tp), 1e-9);
}

TEST(Guidance, CatsBranchesByAlignment) {
  const DisturbanceState w{250, 0.1, 2.0};
  const EngagementState closing = make_x(3000, 0.1, 0.3, 500, 0.05, 0.35);
  const EngagementState adverse = make_x(3000, 0.1, 0.3, 500, -0.05, 0.3 + kPi - 0.05);
  ASSERT_GT(alignment_cache(closing, w).closing_alignment, 0.9);
  ASSERT_LT(alignment_cache(adverse, w).closing_alignment, -0.9);

  for (const CatsBranchOrder order : {CatsBranchOrder::kSwapped, CatsBranchOrder::kAsPrinted}) {
    GuidanceOptions o;
    o.cats_order = order;
    const bool swapped = order == CatsBranchOrder::kSwapped;
    for (const EngagementState& x : {closing, adverse}) {
      const GuidanceCommand iol = iol_command(x, w, {}, pursuer_params(), {}, o);
      const GuidanceCommand cats = cats_command(x, w, {}, pursuer_params(), {}, o);
      const bool plain = (alignment_cache(x, w).closing_alignment >= 0) == swapped;
      EXPECT_EQ(cats.branch, plain ? Branch::kStandard : Branch::kToggled);
      const double sign = plain ? 1.0 : -1.0;
      EXPECT_EQ(cats.u.n_y, sign * iol.u.n_y);
      EXPECT_EQ(cats.u.n_z, sign * iol.u.n_z);
      EXPECT_EQ(cats.validity_margin, iol.validity_margin);
    }
  }
}

TEST(Guidance, PnExample) {
  // LOS north; relative velocity (-100, 100, 50) gives psi_L' = 0.1, theta_L' = -0.05.
  const auto [x, w] = state_from_cartesian({{0, 0, -5000}, {500, 0, 0}},
                                           {{1000, 0, -5000}, {400, 100, 50}});
  const Vector2 y = output_h(x, w);
  ASSERT_NEAR(y(0), 0.1, 1e-12);
  ASSERT_NEAR(y(1), -0.05, 1e-12);
  const GuidanceCommand c = pn_command(x, w, GuidanceGains{50, 50, 3});
  EXPECT_NEAR(c.u.n_y, 150.0, 1e-9);
  EXPECT_NEAR(c.u.n_z, 75.0, 1e-9);
  EXPECT_EQ(c.branch, Branch::kNotApplicable);

  const GuidanceCommand c6 = pn_command(x, w, GuidanceGains{50, 50, 6});
  EXPECT_NEAR(c6.u.n_y, 2 * c.u.n_y, 1e-9);
  EXPECT_NEAR(c6.u.n_z, 2 * c.u.n_z, 1e-9);
}

TEST(Guidance, PnZeroForZeroRates) {
  const GuidanceCommand c = pn_command(make_x(1000, 0, 0, 300, 0, 0), {200, 0, 0}, {});
  EXPECT_EQ(c.u.n_y, 0.0);
  EXPECT_EQ(c.u.n_z, 0.0);
}

TEST(Guidance, ControllerHoldsThenFails) {
  GuidanceController ctl(GuidanceLaw::kCats, {}, {}, 0.05);
  const DisturbanceState w{250, 0.0, 1.0};
  const EngagementState good = make_x(3000, 0, 0, 500, 0, 0.5);
  const EngagementState bad = make_x(3000, 0, 0, 500, 0, kPi / 2);
  const auto first = ctl.update(0.0, good, w, pursuer_params(), {});
  EXPECT_FALSE(first.held);

  const auto held = ctl.update(0.01, bad, w, pursuer_params(), {});
  EXPECT_TRUE(held.held);
  EXPECT_EQ(held.command.u, first.command.u);
  EXPECT_EQ(held.command.branch, first.command.branch);
  EXPECT_NEAR(held.command.validity_margin, 0.0, 1e-15);
  EXPECT_NO_THROW(ctl.update(0.06, bad, w, pursuer_params(), {}));
  EXPECT_THROW(ctl.update(0.0601, bad, w, pursuer_params(), {}), ValidityError);

  // A valid evaluation ends the hold.
  EXPECT_FALSE(ctl.update(0.07, good, w, pursuer_params(), {}).held);
}

TEST(Guidance, ControllerHoldsStraightFlightBeforeFirstValidCommand) {
  GuidanceController ctl(GuidanceLaw::kIol, {}, {}, 0.05);
  const auto out =
      ctl.update(0.0, make_x(3000, 0, 0, 500, 0, kPi / 2), {250, 0, 0}, VehicleParams{}, {});
  EXPECT_TRUE(out.held);
  EXPECT_EQ(out.applied, ManeuverCommand{});
  EXPECT_EQ(out.command.branch, Branch::kStandard);
}

TEST(Guidance, ControllerSaturatesAppliedCommand) {
  VehicleParams p;
  p.accel_limit = 1.0;
  GuidanceController ctl(GuidanceLaw::kPn, {}, {});
  const auto [x, w] = state_from_cartesian({{0, 0, -5000}, {500, 0, 0}},
                                           {{1000, 0, -5000}, {400, 100, 50}});
  const auto out = ctl.update(0.0, x, w, p, {});
  EXPECT_NEAR(out.command.u.n_y, 150.0, 1e-9);
  EXPECT_EQ(out.applied.n_y, 1.0);
  EXPECT_EQ(out.applied.n_z, 1.0);
}

// With the exact linearization the LOS rates obey y' = -K y.
TEST(Guidance, ExactLinearizationDecay) {
  TrialSetup s = idealized({{0, 0, -5000}, 500.0 * direction_from_angles(0.1, 0.3)},
                           {{4000, 1000, -5500}, 250.0 * direction_from_angles(-0.2, 1.2)},
                           GuidanceLaw::kIol);
  SimConfig sim;
  sim.update = GuidanceUpdate::kContinuous;
  sim.t_max = 0.1;
  TrajectoryLog log;
  run_trial(s, sim, &log);
  const Vector2 y0 = log.samples.front().y;
  ASSERT_GT(std::abs(y0(0)), 1e-3);
  ASSERT_GT(std::abs(y0(1)), 1e-3);
  int checked = 0;
  for (const TrajectorySample& smp : log.samples) {
    if (smp.t > 3.0 / 50.0 + 1e-12) break;
    EXPECT_FALSE(smp.held);
    EXPECT_EQ(smp.commanded, smp.applied);
    const double decay = std::exp(-50.0 * smp.t);
    EXPECT_LT(iolguide::testing::rel_err(std::abs(smp.y(0)), std::abs(y0(0)) * decay), 1e-3);
    EXPECT_LT(iolguide::testing::rel_err(std::abs(smp.y(1)), std::abs(y0(1)) * decay), 1e-3);
    ++checked;
  }
  EXPECT_EQ(checked, 61);
}

// Once CATS has regulated the LOS rates on the closing branch, range only
// decreases until closest approach.
TEST(Guidance, CatsClosingBranchIsMonotone) {
  StateGen gen(38);
  for (int trial = 0; trial < 20; ++trial) {
    const CartesianPose p{{0, 0, -5000},
                          gen.uniform(500, 800) * direction_from_angles(gen.uniform(-0.5, 0.5),
                                                                       gen.angle())};
    Vec3 evader_position;
    do {
      evader_position = {gen.uniform(-5000, 5000), gen.uniform(-5000, 5000),
                         gen.uniform(-7000, -3000)};
    } while ((evader_position - p.position).norm() < 2000.0);
    const CartesianPose e{evader_position,
                          gen.uniform(150, 300) * direction_from_angles(gen.uniform(-0.3, 0.3),
                                                                       gen.angle())};
    TrajectoryLog log;
    const TrialRecord rec = run_trial(idealized(p, e, GuidanceLaw::kCats), SimConfig{}, &log);
    EXPECT_EQ(rec.outcome, Outcome::kIntercept) << "trial " << trial;
    bool settled = false;
    for (const TrajectorySample& smp : log.samples) {
      if (smp.t >= rec.intercept_time) break;
      const double c = alignment_cache(smp.x, smp.w).closing_alignment;
      settled = settled || (smp.y.norm() < 1e-4 && c > 0.0);
      if (settled) {
        ASSERT_LT(smp.range_rate, 0.0) << "trial " << trial << " t " << smp.t;
      }
    }
    EXPECT_TRUE(settled) << "trial " << trial;
  }
}
