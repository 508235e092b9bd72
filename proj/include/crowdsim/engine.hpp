#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "crowdsim/batch_solver.hpp"
#include "crowdsim/error.hpp"
#include "crowdsim/geometry.hpp"
#include "crowdsim/orca.hpp"
#include "crowdsim/random.hpp"
#include "crowdsim/spatial_grid.hpp"
#include "crowdsim/worker_pool.hpp"

namespace crowdsim {

struct AgentState {
  std::size_t agent_id = 0;
  Vec2 position;
  Vec2 velocity;
  double radius = 0.5;
  double desired_speed = 1.0;
  double max_speed = 1.33;
  Vec2 goal;
  bool active = true;

  bool operator==(const AgentState&) const = default;
};

struct SimParams {
  double dt = 0.1;
  double time_horizon = 5.0;
  double r_obs = 15.0;
  std::size_t neighbor_cap = 32;
  double responsibility = 0.5;
  std::optional<double> goal_tolerance;  // unset: each agent's own radius
  std::uint64_t rng_seed = 0;
  std::size_t worker_count = 1;
  std::size_t work_unit_size = 8;
  std::size_t step_cap = 100000;

  bool operator==(const SimParams&) const = default;
};

struct StepReport {
  std::size_t step_index = 0;
  std::size_t active_count = 0;
  std::size_t infeasible_count = 0;
  std::size_t collision_count = 0;
  double wall_time_ms = 0.0;
};

/// Pairs closer than combined radius minus this count as collisions.
inline constexpr double kCollisionSlack = 1e-3;
inline constexpr double kJitterDistance = 1e-4;

inline void validate(const SimParams& p) {
  const auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw Error(ErrorCode::kValidationError, what);
    }
  };
  require(p.dt > 0.0 && std::isfinite(p.dt), "dt must be positive");
  require(p.time_horizon > 0.0 && std::isfinite(p.time_horizon), "time_horizon must be positive");
  require(p.time_horizon >= p.dt, "time_horizon must be at least dt");
  require(p.r_obs > 0.0 && std::isfinite(p.r_obs), "r_obs must be positive");
  require(p.neighbor_cap > 0, "neighbor_cap must be positive");
  require(p.responsibility > 0.0 && p.responsibility <= 1.0, "responsibility must lie in (0, 1]");
  require(!p.goal_tolerance || *p.goal_tolerance > 0.0, "goal_tolerance must be positive");
  require(p.worker_count > 0, "worker_count must be positive");
  require(p.work_unit_size > 0, "work_unit_size must be positive");
  require(p.step_cap > 0, "step_cap must be positive");
}

inline double goal_tolerance_for(const AgentState& agent, const SimParams& params) {
  return params.goal_tolerance.value_or(agent.radius);
}

/// Straight-to-goal velocity at the desired speed; zero once within tolerance.
inline Vec2 preferred_velocity(const AgentState& agent, double goal_tolerance) {
  const Vec2 to_goal = agent.goal - agent.position;
  const double distance = abs(to_goal);
  if (distance <= goal_tolerance) {
    return {};
  }
  return to_goal * (agent.desired_speed / distance);
}

inline AgentMessage message_of(const AgentState& a) {
  return {a.agent_id, a.position, a.velocity, a.radius};
}

/// Smallest rectangle holding every active agent, padded by one unit so the
/// grid never degenerates.
inline Rect bounds_of(std::span<const AgentState> agents) {
  Rect r{{0.0, 0.0}, {1.0, 1.0}};
  bool first = true;
  for (const AgentState& a : agents) {
    if (!a.active) {
      continue;
    }
    if (first) {
      r = {a.position, a.position};
      first = false;
    }
    r.min = {std::min(r.min.x, a.position.x), std::min(r.min.y, a.position.y)};
    r.max = {std::max(r.max.x, a.position.x), std::max(r.max.y, a.position.y)};
  }
  r.min -= Vec2(1.0, 1.0);
  r.max += Vec2(1.0, 1.0);
  return r;
}

/// Runs the per-step pipeline on an internal worker pool. Reads only the
/// incoming state and writes a fresh outgoing state, so the order in which
/// agents are listed does not affect any result.
class Engine {
 public:
  Engine(const SimParams& params, const Rect& world_bounds)
      : params_(params), bounds_(world_bounds), pool_(params.worker_count) {
    validate(params_);
    if (!(world_bounds.width() > 0.0) || !(world_bounds.height() > 0.0)) {
      throw Error(ErrorCode::kEmptyWorld, "world bounds have zero area");
    }
  }

  const SimParams& params() const { return params_; }
  const Rect& world_bounds() const { return bounds_; }
  std::size_t steps_taken() const { return step_index_; }

  /// Advances every active agent by one step. The returned vector lists the
  /// agents in the same order as `state`.
  std::vector<AgentState> step(std::span<const AgentState> state, StepReport& report) {
    const auto started = std::chrono::steady_clock::now();
    report = StepReport{};
    report.step_index = step_index_;

    std::vector<std::size_t> active;
    active.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state[i].active) {
        active.push_back(i);
      }
    }

    std::vector<AgentMessage> messages(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      messages[k] = message_of(state[active[k]]);
    }

    const OrcaParams orca{params_.time_horizon, params_.dt, params_.responsibility};
    std::vector<LpProblem> problems(active.size());
    std::vector<char> coincident(active.size(), 0);

    const auto observe = [&](const SpatialGrid& grid) {
      pool_.parallel_for(active.size(), 32, [&](std::size_t k, std::size_t) {
        const AgentState& self = state[active[k]];
        const AgentMessage& msg = messages[k];
        const std::vector<NeighborView> neighbors =
            query_neighbors(grid, msg, params_.r_obs, params_.neighbor_cap);
        for (const NeighborView& nb : neighbors) {
          if (abs_sq(nb.relative_position) < kMinNormalizable * kMinNormalizable &&
              nb.neighbor_id < self.agent_id) {
            coincident[k] = 1;
          }
        }
        LpProblem& problem = problems[k];
        problem.constraints =
            build_constraints(msg.velocity, neighbors, orca, params_.neighbor_cap).halfplanes;
        AgentState moved = self;
        moved.position = msg.position;
        problem.preferred = preferred_velocity(moved, goal_tolerance_for(self, params_));
        problem.max_speed = self.max_speed;
        problem.problem_id = self.agent_id;
      });
    };

    SpatialGrid grid(messages, bounds_, params_.r_obs);
    observe(grid);

    // Coincident centers: nudge the higher-id agent of each pair in a seeded
    // direction and observe again.
    if (std::find(coincident.begin(), coincident.end(), 1) != coincident.end()) {
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (coincident[k]) {
          CounterRng rng(hash_combine(hash_combine(params_.rng_seed, step_index_),
                                      messages[k].agent_id));
          const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
          messages[k].position += kJitterDistance * Vec2(std::cos(angle), std::sin(angle));
        }
      }
      std::fill(coincident.begin(), coincident.end(), 0);
      grid = SpatialGrid(messages, bounds_, params_.r_obs);
      observe(grid);
    }

    const BatchConfig batch{pool_.size(), params_.work_unit_size,
                            hash_combine(params_.rng_seed, step_index_)};
    const std::vector<LpSolution> solutions = solve_batch(pool_, problems, batch);

    std::vector<AgentState> next(state.begin(), state.end());
    std::vector<AgentMessage> moved(active.size());
    double max_radius = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      AgentState& a = next[active[k]];
      a.velocity = solutions[k].velocity;
      a.position = messages[k].position + a.velocity * params_.dt;
      moved[k] = message_of(a);
      max_radius = std::max(max_radius, a.radius);
      if (!solutions[k].feasible) {
        ++report.infeasible_count;
      }
    }

    report.collision_count = count_collisions(moved, max_radius);

    for (std::size_t k = 0; k < active.size(); ++k) {
      AgentState& a = next[active[k]];
      if (abs(a.goal - a.position) <= goal_tolerance_for(a, params_)) {
        a.active = false;
      } else {
        ++report.active_count;
      }
    }

    ++step_index_;
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return next;
  }

 private:
  std::size_t count_collisions(std::span<const AgentMessage> agents, double max_radius) {
    if (agents.empty()) {
      return 0;
    }
    const double cell = std::max(params_.r_obs, 2.0 * max_radius);
    const SpatialGrid grid(agents, bounds_, cell);
    std::vector<std::size_t> per_agent(agents.size(), 0);
    pool_.parallel_for(agents.size(), 64, [&](std::size_t k, std::size_t) {
      const AgentMessage& self = agents[k];
      std::size_t hits = 0;
      grid.for_each_near(grid.cell_for(self.position), [&](const AgentMessage& other) {
        if (other.agent_id <= self.agent_id) {
          return;
        }
        const double limit = self.radius + other.radius - kCollisionSlack;
        if (limit > 0.0 && abs_sq(other.position - self.position) < limit * limit) {
          ++hits;
        }
      });
      per_agent[k] = hits;
    });
    std::size_t total = 0;
    for (std::size_t h : per_agent) {
      total += h;
    }
    return total;
  }

  SimParams params_;
  Rect bounds_;
  WorkerPool pool_;
  std::size_t step_index_ = 0;
};

/// Single step with a throwaway engine whose grid covers the active agents.
inline std::vector<AgentState> step(std::span<const AgentState> state, const SimParams& params,
                                    StepReport& report) {
  Engine engine(params, bounds_of(state));
  return engine.step(state, report);
}

struct RunResult {
  std::vector<AgentState> final_state;
  std::vector<StepReport> reports;
  bool step_cap_reached = false;
};

using StepObserver = std::function<void(std::span<const AgentState>, const StepReport&)>;

/// Steps until no agent is active or the step cap is hit, calling `observer`
/// after every step with the post-step state.
inline RunResult run(std::vector<AgentState> state, const SimParams& params,
                     const Rect& world_bounds, const StepObserver& observer = {}) {
  RunResult result;
  Engine engine(params, world_bounds);
  const auto any_active = [](std::span<const AgentState> s) {
    return std::any_of(s.begin(), s.end(), [](const AgentState& a) { return a.active; });
  };
  while (any_active(state)) {
    if (engine.steps_taken() >= params.step_cap) {
      result.step_cap_reached = true;
      break;
    }
    StepReport report;
    state = engine.step(state, report);
    if (observer) {
      observer(state, report);
    }
    result.reports.push_back(report);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace crowdsim
