#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "crowdsim/engine.hpp"
#include "crowdsim/scenario.hpp"
#include "crowdsim/simulation.hpp"

using namespace crowdsim;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIoError;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

double bearing_deg(const Vec2& v) { return std::atan2(v.y, v.x) * 180.0 / std::numbers::pi; }

double angle_between_deg(double from, double to) {
  double d = std::fmod(to - from, 360.0);
  if (d < 0) d += 360.0;
  return d;
}

void expect_no_spawn_overlap(const std::vector<AgentState>& agents) {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      ASSERT_GE(abs(agents[i].position - agents[j].position), agents[i].radius + agents[j].radius)
          << i << " " << j;
    }
  }
}

}  // namespace

TEST(GenerateTwoWay, PopulationMatchesRequest) {
  const Scenario s = generate_two_way(1250, false, 1);
  EXPECT_EQ(s.agent_count(), 2500u);
  const std::vector<AgentState> agents = instantiate(s);
  ASSERT_EQ(agents.size(), 2500u);
  for (const AgentState& a : agents) {
    EXPECT_EQ(a.radius, 0.5);
    EXPECT_EQ(a.desired_speed, 1.0);
    EXPECT_DOUBLE_EQ(a.max_speed, 1.33);
  }
}

TEST(GenerateTwoWay, SpawnRegionIsTheOtherGroupsGoal) {
  const Scenario s = generate_two_way(100, false, 2);
  ASSERT_EQ(s.groups.size(), 2u);
  EXPECT_EQ(s.groups[0].spawn_region, s.groups[1].goal_region);
  EXPECT_EQ(s.groups[1].spawn_region, s.groups[0].goal_region);
  for (const AgentState& a : instantiate(s)) {
    const SpawnGroup& g = s.groups[a.agent_id < 100 ? 0 : 1];
    EXPECT_TRUE(g.goal_region.contains(a.goal));
    EXPECT_TRUE(g.spawn_region.contains(a.position));
  }
}

TEST(GenerateTwoWay, FreeSpaceFractionInSpawnRegions) {
  const Scenario s = generate_two_way(1250, false, 3);
  const double occupied = 1250 * std::numbers::pi * 0.25;
  EXPECT_NEAR(1.0 - occupied / s.groups[0].spawn_region.area(), 0.85, 1e-9);
}

TEST(GenerateTwoWay, HeterogeneousDrawsAreSeeded) {
  const std::vector<AgentState> a = instantiate(generate_two_way(1, true, 42));
  const std::vector<AgentState> b = instantiate(generate_two_way(1, true, 42));
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a[i].radius, b[i].radius);
    EXPECT_EQ(a[i].desired_speed, b[i].desired_speed);
    EXPECT_EQ(a[i].position, b[i].position);
  }
}

TEST(GenerateTwoWay, HeterogeneousChoicesAndCap) {
  const std::vector<AgentState> agents = instantiate(generate_two_way(600, true, 4));
  std::map<double, int> radii;
  std::map<double, int> speeds;
  for (const AgentState& a : agents) {
    ++radii[a.radius];
    ++speeds[a.desired_speed];
    EXPECT_DOUBLE_EQ(a.max_speed, 1.25 * a.desired_speed);
  }
  EXPECT_EQ(radii.size(), 3u);
  EXPECT_EQ(speeds.size(), 3u);
  for (const auto& [value, n] : radii) EXPECT_NEAR(n, 400, 80) << value;
  for (const auto& [value, n] : speeds) EXPECT_NEAR(n, 400, 80) << value;
}

TEST(GenerateTwoWay, RegionTooSmall) {
  TwoWayLayout tiny;
  tiny.region_width = 3.0;
  tiny.region_height = 3.0;
  EXPECT_EQ(code_of([&] { generate_two_way(50, false, 1, tiny); }), ErrorCode::kRegionTooSmall);
}

TEST(GenerateTwoWay, SeededReproducibility) {
  EXPECT_EQ(generate_two_way(300, true, 9), generate_two_way(300, true, 9));
  EXPECT_EQ(instantiate(generate_two_way(300, true, 9)).size(), 600u);
  const auto a = instantiate(generate_two_way(300, true, 9));
  const auto b = instantiate(generate_two_way(300, true, 10));
  EXPECT_NE(a[0].position, b[0].position);
}

TEST(GenerateTwoWay, SpawnsDoNotOverlap) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    expect_no_spawn_overlap(instantiate(generate_two_way(400, true, seed)));
    expect_no_spawn_overlap(instantiate(generate_two_way(400, false, seed)));
  }
}

TEST(GenerateEightWay, TenThousandAgents) {
  const Scenario s = generate_eight_way(1250, 1);
  EXPECT_EQ(s.agent_count(), 10000u);
  EXPECT_EQ(s.groups.size(), 8u);
}

TEST(GenerateEightWay, RingPlacementAndGoalBearing) {
  const Scenario s = generate_eight_way(20, 5);
  for (int k = 0; k < 8; ++k) {
    const double spawn = bearing_deg(s.groups[k].spawn_region.center());
    const double goal = bearing_deg(s.groups[k].goal_region.center());
    EXPECT_NEAR(angle_between_deg(0.0, spawn), std::fmod(45.0 * k, 360.0), 1e-9) << k;
    EXPECT_NEAR(angle_between_deg(spawn, goal), 135.0, 1e-9) << k;
  }
  // Every agent's goal bearing is 135 degrees round from its spawn bearing.
  for (const AgentState& a : instantiate(s)) {
    EXPECT_NEAR(angle_between_deg(bearing_deg(a.position), bearing_deg(a.goal)), 135.0, 1e-9);
  }
  expect_no_spawn_overlap(instantiate(s));
}

TEST(GenerateEightWay, OneAgentPerGroupCirclesTheCenter) {
  const Scenario s = generate_eight_way(1, 3);
  SimParams params = resolve_params(s);
  double worst_gap = 1e9;
  std::size_t same_sign = 0;
  std::size_t steps = 0;
  const ScenarioRun r = run_scenario(s, params, nullptr, [&](std::span<const AgentState> st, const StepReport&) {
    double tangential = 0.0;
    for (const AgentState& a : st) {
      if (a.active && abs(a.position) > 1e-9) tangential += det(a.position, a.velocity) / abs(a.position);
    }
    ++steps;
    same_sign += tangential > 0.0 ? 1 : 0;
    for (std::size_t i = 0; i < st.size(); ++i)
      for (std::size_t j = i + 1; j < st.size(); ++j)
        if (st[i].active && st[j].active) worst_gap = std::min(worst_gap, abs(st[i].position - st[j].position));
  });
  EXPECT_FALSE(r.result.step_cap_reached);
  EXPECT_GT(same_sign, steps * 6 / 10);  // counter-clockwise swirl
  EXPECT_GT(worst_gap, 0.5);
}

TEST(ScenarioText, RoundTripPreservesValue) {
  for (const Scenario& s : {generate_two_way(30, false, 1), generate_two_way(30, true, 2),
                            generate_eight_way(10, 3)}) {
    const Scenario back = load_scenario(save_scenario(s));
    EXPECT_EQ(back, s);
    EXPECT_EQ(save_scenario(back), save_scenario(s));
  }
  Scenario with_params = generate_two_way(5, false, 1);
  with_params.params_override.time_horizon = 3.0;
  with_params.params_override.neighbor_cap = 12;
  EXPECT_EQ(load_scenario(save_scenario(with_params)), with_params);
}

TEST(ScenarioText, ProbabilitiesMustSumToOne) {
  Scenario s = generate_two_way(5, true, 1);
  s.groups[0].speed_choices = {{1.0, 0.3}, {1.33, 0.3}, {2.0, 0.3}};
  const std::string text = save_scenario(s);
  EXPECT_EQ(code_of([&] { load_scenario(text); }), ErrorCode::kValidationError);
  EXPECT_NE(message_of([&] { load_scenario(text); }).find("groups[0].speed_choices"), std::string::npos);
}

TEST(ScenarioText, UnknownFieldIsNamed) {
  std::string text = save_scenario(generate_two_way(5, false, 1));
  text.replace(text.find("\"max_speed_factor\""), 0, "\"colour\": \"red\",\n      ");
  EXPECT_EQ(code_of([&] { load_scenario(text); }), ErrorCode::kParseError);
  EXPECT_NE(message_of([&] { load_scenario(text); }).find("groups[0].colour"), std::string::npos);
}

TEST(ScenarioText, SyntaxErrorReportsPosition) {
  const std::string text = "{\n  \"format\": \"crowdsim-scenario\",\n  \"version\": 1,,\n}";
  EXPECT_EQ(code_of([&] { load_scenario(text); }), ErrorCode::kParseError);
  EXPECT_NE(message_of([&] { load_scenario(text); }).find("line 3"), std::string::npos);
}

TEST(ScenarioText, MissingAndMistypedFields) {
  EXPECT_EQ(code_of([] { load_scenario(R"({"format": "crowdsim-scenario", "version": 1})"); }),
            ErrorCode::kParseError);
  std::string text = save_scenario(generate_two_way(5, false, 1));
  text.replace(text.find("\"count\": 5"), 10, "\"count\": \"five\"");
  EXPECT_NE(message_of([&] { load_scenario(text); }).find("groups[0].count"), std::string::npos);
}

TEST(ScenarioValidate, RegionsMustLieInsideWorld) {
  Scenario s = generate_two_way(5, false, 1);
  s.world_bounds.max.x = s.groups[0].goal_region.max.x - 1.0;
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::kValidationError);
}

TEST(ScenarioValidate, ParamsOverridesApply) {
  Scenario s = generate_two_way(5, false, 1);
  s.params_override.dt = 0.05;
  s.params_override.rng_seed = 11;
  const SimParams p = resolve_params(s);
  EXPECT_EQ(p.dt, 0.05);
  EXPECT_EQ(p.rng_seed, 11u);
  EXPECT_EQ(p.time_horizon, 5.0);
  s.params_override.responsibility = 1.5;
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::kValidationError);
}
