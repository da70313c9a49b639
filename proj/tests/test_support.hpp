#pragma once

#include <random>

#include "iolguide/engagement.hpp"

namespace iolguide::testing {

// Fixed-seed generator for property tests; angles stay clear of the poles.
class StateGen {
 public:
  explicit StateGen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }
  double angle() { return uniform(-kPi, kPi); }
  double elevation() { return uniform(-1.3, 1.3); }

  BodyState body(double v_lo, double v_hi) {
    return {uniform(v_lo, v_hi), elevation(), angle()};
  }

  EngagementState engagement() {
    EngagementState x;
    x.range = uniform(200.0, 8000.0);
    x.los_elevation = elevation();
    x.los_azimuth = angle();
    x.pursuer = body(300.0, 1100.0);
    return x;
  }

  DisturbanceState disturbance() { return body(150.0, 600.0); }

  Vec3 unit_vector() {
    Vec3 v;
    do {
      v = {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
    } while (v.norm() < 0.1 || v.norm() > 1.0);
    return v.normalized();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace iolguide::testing
