#include <gtest/gtest.h>

#include <cmath>

#include "crowdsim/geometry.hpp"
#include "crowdsim/random.hpp"

using namespace crowdsim;

TEST(SignedDistance, AxisAlignedExamples) {
  const HalfPlane hp{{0.0, 0.0}, {1.0, 0.0}};
  EXPECT_DOUBLE_EQ(signed_distance(hp, {2.0, 0.0}), 2.0);
  EXPECT_DOUBLE_EQ(signed_distance(hp, {-1.0, 3.0}), -1.0);
  EXPECT_DOUBLE_EQ(signed_distance(HalfPlane{{0.9, 0.0}, {-1.0, 0.0}}, {0.9, 5.0}), 0.0);
}

TEST(SignedDistance, PermitsIsTheNonNegativeSide) {
  const HalfPlane hp{{0.9, 0.0}, {-1.0, 0.0}};
  EXPECT_TRUE(permits(hp, {0.0, 0.0}));
  EXPECT_TRUE(permits(hp, {0.9, -3.0}));
  EXPECT_FALSE(permits(hp, {1.0, 0.0}));
}

TEST(SignedDistance, DirectionKeepsPermittedSideOnTheLeft) {
  const HalfPlane hp{{0.0, 0.0}, {0.0, 1.0}};
  const Vec2 d = hp.direction();
  EXPECT_GT(det(d, hp.normal), 0.0);
  EXPECT_DOUBLE_EQ(dot(d, hp.normal), 0.0);
}

TEST(SignedDistance, AffineInVelocity) {
  CounterRng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double angle = rng.uniform(0.0, 6.283185307179586);
    const HalfPlane hp{{rng.uniform(-5, 5), rng.uniform(-5, 5)}, {std::cos(angle), std::sin(angle)}};
    const Vec2 v1{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 v2{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double a = rng.uniform(-2.0, 3.0);
    const double lhs = signed_distance(hp, a * v1 + (1.0 - a) * v2);
    const double rhs = a * signed_distance(hp, v1) + (1.0 - a) * signed_distance(hp, v2);
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(SignedDistance, NegatedNormalNegatesExactly) {
  CounterRng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const HalfPlane hp{{rng.uniform(-5, 5), rng.uniform(-5, 5)},
                       normalize(Vec2{rng.uniform(-1, 1), rng.uniform(-1, 1)} + Vec2{1e-3, 0})};
    const HalfPlane flipped{hp.point, -hp.normal};
    const Vec2 v{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    EXPECT_EQ(signed_distance(flipped, v), -signed_distance(hp, v));
  }
}

TEST(Vec2Ops, NormalizeRejectsNearZero) {
  EXPECT_THROW(normalize({0.0, 0.0}), Error);
  EXPECT_THROW(normalize({1e-13, 0.0}), Error);
  try {
    normalize({0.0, 0.0});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateVector);
  }
  const Vec2 n = normalize({3.0, 4.0});
  EXPECT_DOUBLE_EQ(n.x, 0.6);
  EXPECT_DOUBLE_EQ(n.y, 0.8);
}

TEST(Vec2Ops, PerpRotateClip) {
  EXPECT_EQ(perp({1.0, 0.0}), Vec2(0.0, 1.0));
  const Vec2 r = rotate({1.0, 0.0}, 3.141592653589793 / 2.0);
  EXPECT_NEAR(r.x, 0.0, 1e-15);
  EXPECT_NEAR(r.y, 1.0, 1e-15);
  EXPECT_EQ(clip_length({3.0, 4.0}, 10.0), Vec2(3.0, 4.0));
  const Vec2 c = clip_length({3.0, 4.0}, 1.0);
  EXPECT_NEAR(abs(c), 1.0, 1e-15);
}

TEST(RectOps, ContainsAndArea) {
  const Rect r{{0.0, 0.0}, {4.0, 2.0}};
  EXPECT_DOUBLE_EQ(r.area(), 8.0);
  EXPECT_EQ(r.center(), Vec2(2.0, 1.0));
  EXPECT_TRUE(r.contains(Vec2{4.0, 2.0}));
  EXPECT_FALSE(r.contains(Vec2{4.1, 2.0}));
  EXPECT_TRUE(r.contains(Rect{{1.0, 0.5}, {2.0, 1.5}}));
  EXPECT_FALSE(r.contains(Rect{{1.0, 0.5}, {5.0, 1.5}}));
}
