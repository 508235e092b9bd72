#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "crowdsim/oracles.hpp"
#include "crowdsim/orca.hpp"
#include "crowdsim/validation.hpp"

using namespace crowdsim;

namespace {

const OrcaParams kDefault{5.0, 0.1, 0.5};

Vec2 mirror_x(const Vec2& v) { return {-v.x, v.y}; }

}  // namespace

TEST(OrcaHalfplane, StationaryPairTenMetresApart) {
  const NeighborView nb{{10.0, 0.0}, {0.0, 0.0}, 1.0, 1};
  const VelocityAdjustment adj = velocity_adjustment({0.0, 0.0}, nb, kDefault);
  EXPECT_NEAR(adj.u.x, 1.8, 1e-12);
  EXPECT_NEAR(adj.u.y, 0.0, 1e-12);
  const HalfPlane hp = orca_halfplane({0.0, 0.0}, nb, kDefault);
  EXPECT_NEAR(hp.point.x, 0.9, 1e-12);
  EXPECT_NEAR(hp.point.y, 0.0, 1e-12);
  EXPECT_NEAR(hp.normal.x, -1.0, 1e-12);
  EXPECT_NEAR(hp.normal.y, 0.0, 1e-12);
  // Both conceding 0.9 m/s close the 9 m free gap in exactly the horizon.
  EXPECT_NEAR(oracle::sampled_min_distance({0, 0}, {0.9, 0}, {10, 0}, {-0.9, 0}, 5.0, 1000), 1.0, 1e-9);
}

TEST(OrcaHalfplane, FullResponsibilityVariant) {
  const NeighborView nb{{10.0, 0.0}, {0.0, 0.0}, 1.0, 1};
  const HalfPlane hp = orca_halfplane({0.0, 0.0}, nb, OrcaParams{5.0, 0.1, 1.0});
  EXPECT_NEAR(hp.point.x, 1.8, 1e-12);
  EXPECT_NEAR(hp.point.y, 0.0, 1e-12);
}

TEST(OrcaHalfplane, RecedingNeighborNeedsNoAdjustment) {
  const Vec2 self{-1.0, 0.0};
  const NeighborView nb{{10.0, 0.0}, {1.0, 0.0}, 1.0, 1};
  const Vec2 v_rel = self - nb.neighbor_velocity;
  const VelocityAdjustment adj = velocity_adjustment(v_rel, nb, kDefault);
  EXPECT_LE(dot(adj.u, v_rel), 0.0);
  EXPECT_GE(signed_distance(orca_halfplane(self, nb, kDefault), self), 0.0);
}

TEST(OrcaHalfplane, CollidingPairSeparatesWithinOneStep) {
  const NeighborView nb{{0.5, 0.0}, {0.0, 0.0}, 1.0, 1};
  const VelocityAdjustment adj = velocity_adjustment({0.0, 0.0}, nb, kDefault);
  EXPECT_NEAR(adj.u.x, -5.0, 1e-12);
  EXPECT_NEAR(adj.u.y, 0.0, 1e-12);
  EXPECT_NEAR(adj.normal.x, -1.0, 1e-12);
  const HalfPlane a = orca_halfplane({0.0, 0.0}, nb, kDefault);
  const HalfPlane b = orca_halfplane({0.0, 0.0}, {{-0.5, 0.0}, {0.0, 0.0}, 1.0, 0}, kDefault);
  // Each takes the boundary velocity; after one step they are further apart.
  const Vec2 pa = a.point * kDefault.dt;
  const Vec2 pb = Vec2{0.5, 0.0} + b.point * kDefault.dt;
  EXPECT_GT(abs(pb - pa), 0.5);
}

TEST(OrcaHalfplane, CoincidentCentersThrow) {
  try {
    orca_halfplane({0.0, 0.0}, {{0.0, 0.0}, {0.0, 0.0}, 1.0, 1}, kDefault);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateOverlap);
  }
}

TEST(OrcaHalfplane, ReciprocalAdjustments) {
  CounterRng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const double r = rng.uniform(0.4, 2.0);
    const Vec2 p = validation::random_unit(rng) * rng.uniform(0.2, 20.0);
    const Vec2 va{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec2 vb{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const VelocityAdjustment ua = velocity_adjustment(va - vb, {p, vb, r, 1}, kDefault);
    const VelocityAdjustment ub = velocity_adjustment(vb - va, {-p, va, r, 0}, kDefault);
    EXPECT_NEAR(ua.u.x, -ub.u.x, 1e-9);
    EXPECT_NEAR(ua.u.y, -ub.u.y, 1e-9);
  }
}

TEST(OrcaHalfplane, AdjustedVelocityLiesOnObstacleBoundary) {
  CounterRng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const double r = rng.uniform(0.4, 2.0);
    const Vec2 p = validation::random_unit(rng) * rng.uniform(r * 1.01, 20.0);
    const Vec2 v_rel{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const OrcaParams params{rng.uniform(1.0, 10.0), 0.1, 0.5};
    const VelocityAdjustment adj = velocity_adjustment(v_rel, {p, {0, 0}, r, 1}, params);
    EXPECT_NEAR(oracle::vo_clearance(v_rel + adj.u, p, r, params.time_horizon), 0.0, 1e-9);
    // The normal points out of the obstacle: stepping along it clears it.
    EXPECT_GT(oracle::vo_clearance(v_rel + adj.u + 1e-4 * adj.normal, p, r, params.time_horizon), 0.0);
  }
}

TEST(OrcaHalfplane, PairsRespectingTheirHalfPlanesDoNotCollide) {
  const validation::SuiteResult res = validation::orca_pair_suite(2000, 17);
  EXPECT_EQ(res.failed, 0u) << res.first_failure;
}

TEST(BuildConstraints, EmptyAndSingleton) {
  EXPECT_TRUE(build_constraints({0, 0}, {}, kDefault, 32).halfplanes.empty());
  const NeighborView nb{{3.0, 1.0}, {0.5, 0.0}, 1.0, 4};
  const ConstraintSet one = build_constraints({1.0, 0.0}, std::vector{nb}, kDefault, 32);
  ASSERT_EQ(one.halfplanes.size(), 1u);
  EXPECT_EQ(one.halfplanes[0], orca_halfplane({1.0, 0.0}, nb, kDefault));
}

TEST(BuildConstraints, NearestFirstTiesById) {
  std::vector<NeighborView> nbs{{{5.0, 0.0}, {0, 0}, 1.0, 9},
                                {{0.0, 2.0}, {0, 0}, 1.0, 3},
                                {{0.0, -5.0}, {0, 0}, 1.0, 2},
                                {{8.0, 0.0}, {0, 0}, 1.0, 1}};
  const ConstraintSet cs = build_constraints({0, 0}, nbs, kDefault, 3);
  ASSERT_EQ(cs.halfplanes.size(), 3u);
  EXPECT_EQ(cs.halfplanes[0], orca_halfplane({0, 0}, nbs[1], kDefault));
  EXPECT_EQ(cs.halfplanes[1], orca_halfplane({0, 0}, nbs[2], kDefault));  // id 2 before id 9
  EXPECT_EQ(cs.halfplanes[2], orca_halfplane({0, 0}, nbs[0], kDefault));
}

TEST(BuildConstraints, CoincidentNeighborIsSkipped) {
  std::vector<NeighborView> nbs{{{0.0, 0.0}, {0, 0}, 1.0, 5}, {{4.0, 0.0}, {0, 0}, 1.0, 6}};
  const ConstraintSet cs = build_constraints({0, 0}, nbs, kDefault, 32);
  EXPECT_EQ(cs.halfplanes.size(), 1u);
  EXPECT_EQ(cs.skipped_degenerate, 1u);
}

TEST(BuildConstraints, SymmetricHeadOnPairIsMirrored) {
  // Mirror through x = 0: a at (-5, 0) walking +x, b at (5, 0) walking -x.
  const Vec2 pa{-5.0, 0.0};
  const Vec2 pb{5.0, 0.0};
  for (double speed : {0.0, 0.2, 0.5}) {
    const Vec2 va{speed, 0.0};
    const Vec2 vb = mirror_x(va);
    const HalfPlane ha = build_constraints(va, std::vector<NeighborView>{{pb - pa, vb, 1.0, 1}}, kDefault, 32).halfplanes.at(0);
    const HalfPlane hb = build_constraints(vb, std::vector<NeighborView>{{pa - pb, va, 1.0, 0}}, kDefault, 32).halfplanes.at(0);
    EXPECT_NEAR(hb.point.x, mirror_x(ha.point).x, 1e-12);
    EXPECT_NEAR(hb.point.y, mirror_x(ha.point).y, 1e-12);
    EXPECT_NEAR(hb.normal.x, mirror_x(ha.normal).x, 1e-12);
    EXPECT_NEAR(hb.normal.y, mirror_x(ha.normal).y, 1e-12);
  }
}
