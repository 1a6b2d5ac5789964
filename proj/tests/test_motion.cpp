#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cutin/motion.hpp"

namespace cutin {
namespace {

TEST(Attraction, Proportional) {
  EXPECT_EQ(attraction({0, 0}, Vec2{1, 0}, 5.0), (Vec2{5, 0}));
  EXPECT_EQ(attraction({2, -1}, Vec2{2, -1}, 5.0), (Vec2{0, 0}));
  EXPECT_EQ(attraction({2, -1}, std::nullopt, 5.0), (Vec2{0, 0}));
}

TEST(Repulsion, GaussianDecayInsideActivationDistance) {
  const std::vector<Vec2> p{{0, 0}, {0.3, 0}};
  const Vec2 du = repulsion(1, p, true, 800.0, 0.35, 0.55);
  EXPECT_NEAR(du.x, 731.1449482169826, 1e-9);
  EXPECT_EQ(du.y, 0.0);
  const Vec2 back = repulsion(0, p, true, 800.0, 0.35, 0.55);
  EXPECT_EQ(back.x, -du.x);
}

TEST(Repulsion, ZeroBeyondActivationDistance) {
  const std::vector<Vec2> p{{0, 0}, {0.6, 0}};
  EXPECT_EQ(repulsion(1, p, true, 800.0, 0.35, 0.55), (Vec2{0, 0}));
}

TEST(Repulsion, ActivationDistanceIsInclusive) {
  const std::vector<Vec2> p{{0, 0}, {0.5, 0}};
  EXPECT_GT(repulsion(1, p, true, 800.0, 0.35, 0.5).x, 0.0);
}

TEST(Repulsion, UnassignedAgentsUseScaledGain) {
  EXPECT_DOUBLE_EQ(repulsion_gain(false, 800.0, 0.35), 280.0);
  EXPECT_EQ(repulsion_gain(true, 800.0, 0.35), 800.0);
  const std::vector<Vec2> p{{0, 0}, {0.3, 0}};
  const Vec2 full = repulsion(1, p, true, 800.0, 0.35, 0.55);
  const Vec2 scaled = repulsion(1, p, false, 800.0, 0.35, 0.55);
  EXPECT_NEAR(scaled.x, 0.35 * full.x, 1e-12);
}

TEST(Repulsion, SumsOverNeighbours) {
  const std::vector<Vec2> p{{0, 0}, {0.3, 0}, {0, 0.4}, {5, 5}};
  const Vec2 du = repulsion(0, p, true, 800.0, 0.35, 0.55);
  EXPECT_NEAR(du.x, -800.0 * std::exp(-0.09), 1e-9);
  EXPECT_NEAR(du.y, -800.0 * std::exp(-0.16), 1e-9);
}

TEST(Repulsion, CoincidentAgentsSeparateDeterministically) {
  const std::vector<Vec2> p{{1, 1}, {1, 1}};
  const Vec2 a = repulsion(0, p, true, 800.0, 0.35, 0.55);
  const Vec2 b = repulsion(1, p, true, 800.0, 0.35, 0.55);
  EXPECT_TRUE(a.finite());
  EXPECT_TRUE(b.finite());
  EXPECT_GT(a.x, 0.0);
  EXPECT_LT(b.x, 0.0);
  EXPECT_EQ(a.x, -b.x);
}

TEST(Integrate, EulerStepAtSpeedLimit) {
  const Region r;
  const Vec2 x = integrate({0, 0}, {5, 0}, {0, 0}, 0.02, 5.0, r);
  EXPECT_DOUBLE_EQ(x.x, 0.1);
  EXPECT_EQ(x.y, 0.0);
}

TEST(Integrate, SaturatesFarReference) {
  const Region r;
  EXPECT_EQ(saturate({50, 0}, 5.0), (Vec2{5, 0}));
  const Vec2 x = integrate({0, 0}, {50, 0}, {0, 0}, 0.02, 5.0, r);
  EXPECT_DOUBLE_EQ(x.x, 0.1);
}

TEST(Integrate, SaturationAppliesToCombinedInput) {
  const Region r;
  const Vec2 x = integrate({0, 0}, {3, 0}, {0, 731.0}, 0.02, 5.0, r);
  EXPECT_NEAR(x.norm(), 0.1, 1e-15);
}

TEST(Integrate, ClampsToRegion) {
  const Region r;
  const Vec2 x = integrate({9.99, 0}, {5, 0}, {0, 0}, 0.02, 5.0, r);
  EXPECT_EQ(x, (Vec2{10, 0}));
}

TEST(Integrate, SpeedNeverExceedsLimit) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1000, 1000);
  const Region r{-1e6, 1e6, -1e6, 1e6};
  for (int k = 0; k < 1000; ++k) {
    const Vec2 x0{u(rng), u(rng)};
    const Vec2 x1 = integrate(x0, {u(rng), u(rng)}, {u(rng), u(rng)}, 0.02, 5.0, r);
    EXPECT_LE(distance(x0, x1), 0.1 * (1 + 1e-12));
  }
}

// Unsaturated single agent: e_{k+1} = (1 - k dt) e_k. The check stops after
// ten steps so the error stays far above the rounding of the coordinates.
TEST(Integrate, ErrorContractsByEulerFactor) {
  const double k = 5.0, dt = 0.02, v_max = 5.0;
  const double factor = 1.0 - k * dt;
  const Region r;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> pos(-9, 9), rad(0.1, 0.99), ang(0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 ref{pos(rng), pos(rng)};
    const double rr = rad(rng), th = ang(rng);
    Vec2 x = ref + Vec2{rr * std::cos(th), rr * std::sin(th)};
    for (int s = 0; s < 10; ++s) {
      const double e0 = distance(x, ref);
      x = integrate(x, attraction(x, ref, k), {}, dt, v_max, r);
      EXPECT_NEAR(distance(x, ref) / e0, factor, 1e-12 * factor);
    }
  }
}

}  // namespace
}  // namespace cutin
