#pragma once

// Seeded randomized oracle suites. Each suite draws its own instances, runs
// the production code and the matching brute-force oracle, and counts
// agreements.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "crowdsim/batch_solver.hpp"
#include "crowdsim/lp_solver.hpp"
#include "crowdsim/oracles.hpp"
#include "crowdsim/orca.hpp"
#include "crowdsim/random.hpp"
#include "crowdsim/scenario.hpp"
#include "crowdsim/simulation.hpp"
#include "crowdsim/spatial_grid.hpp"

namespace crowdsim::validation {

struct SuiteResult {
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst = 0.0;  // largest observed error (suite-specific meaning)
  std::string first_failure;

  bool ok() const { return failed == 0 && passed > 0; }

  void record(bool pass, const std::string& what) {
    if (pass) {
      ++passed;
    } else {
      if (failed == 0) {
        first_failure = what;
      }
      ++failed;
    }
  }
};

inline constexpr double kOracleTolerance = 1e-6;
inline constexpr double kFallbackSlack = 2e-3;
inline constexpr double kFallbackResolution = 1e-3;
inline constexpr double kPairTolerance = 1e-6;

inline Vec2 random_unit(CounterRng& rng) {
  const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(a), std::sin(a)};
}

/// Up to `max_constraints` random half-planes in a [-2, 2]^2 box, random
/// preferred velocity and max speed.
inline LpProblem random_lp(CounterRng& rng, std::size_t max_constraints, std::uint64_t id) {
  LpProblem p;
  p.problem_id = id;
  const std::size_t m = rng.below(max_constraints + 1);
  for (std::size_t k = 0; k < m; ++k) {
    p.constraints.push_back({{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}, random_unit(rng)});
  }
  p.preferred = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
  p.max_speed = rng.uniform(0.1, 3.0);
  return p;
}

/// Random problem with empty feasible set: half-planes facing away from the
/// origin, each demanding an outward speed. Retries until the enumeration
/// oracle confirms emptiness.
inline LpProblem random_infeasible_lp(CounterRng& rng, std::uint64_t id) {
  for (;;) {
    LpProblem p;
    p.problem_id = id;
    p.max_speed = rng.uniform(0.2, 1.0);
    const std::size_t m = 2 + rng.below(7);
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 n = random_unit(rng);
      p.constraints.push_back({n * (p.max_speed * rng.uniform(0.1, 1.2)), n});
    }
    p.preferred = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (!oracle::lp_vertex_enumeration(p.constraints, p.preferred, p.max_speed)) {
      return p;
    }
  }
}

/// LP optimum and feasibility classification against vertex enumeration.
inline SuiteResult lp_oracle_suite(std::size_t instances, std::uint64_t seed,
                                   std::size_t max_constraints = 32) {
  SuiteResult res;
  CounterRng rng(hash_combine(seed, 0x11));
  for (std::size_t i = 0; i < instances; ++i) {
    const LpProblem p = random_lp(rng, max_constraints, i);
    const LpSolution s = solve_incremental_2d(p, shuffle_seed_for(seed, i));
    const std::optional<Vec2> ref = oracle::lp_vertex_enumeration(p.constraints, p.preferred, p.max_speed);
    std::ostringstream what;
    what << "instance " << i;
    if (ref.has_value() != s.feasible) {
      what << ": feasibility mismatch (solver " << s.feasible << ", oracle " << ref.has_value() << ")";
      res.record(false, what.str());
      continue;
    }
    if (!ref) {
      res.record(true, "");
      continue;
    }
    const double err = std::max(std::fabs(ref->x - s.velocity.x), std::fabs(ref->y - s.velocity.y));
    res.worst = std::max(res.worst, err);
    what << ": optimum differs by " << err;
    res.record(err <= kOracleTolerance, what.str());
  }
  return res;
}

/// Least-penetration fallback against an exhaustive lattice search.
inline SuiteResult fallback_suite(std::size_t instances, std::uint64_t seed) {
  SuiteResult res;
  CounterRng rng(hash_combine(seed, 0x22));
  for (std::size_t i = 0; i < instances; ++i) {
    const LpProblem p = random_infeasible_lp(rng, i);
    const LpSolution s = solve(p, shuffle_seed_for(seed, i));
    const double achieved = oracle::max_penetration(p.constraints, s.velocity);
    const double grid = oracle::grid_min_penetration(p.constraints, p.max_speed, kFallbackResolution);
    const bool in_disc = abs(s.velocity) <= p.max_speed + kFeasibilityTolerance;
    res.worst = std::max(res.worst, achieved - grid);
    std::ostringstream what;
    what << "instance " << i << ": achieved " << achieved << " vs lattice " << grid
         << (in_disc ? "" : " (outside disc)");
    res.record(!s.feasible && in_disc && achieved <= grid + kFallbackSlack, what.str());
  }
  return res;
}

/// Grid query (before the cap) against an all-pairs scan. Populations are
/// log-uniform in [2, max_agents]; the first configuration uses max_agents.
inline SuiteResult grid_suite(std::size_t configs, std::uint64_t seed,
                              std::size_t max_agents = 5000) {
  SuiteResult res;
  CounterRng rng(hash_combine(seed, 0x33));
  for (std::size_t c = 0; c < configs; ++c) {
    const std::size_t n =
        c == 0 ? max_agents
               : static_cast<std::size_t>(std::exp(rng.uniform(std::log(2.0), std::log(double(max_agents)))));
    const double r_obs = rng.uniform(1.0, 20.0);
    const double density = rng.uniform(0.01, 1.0);  // agents per m^2
    const double side = std::sqrt(static_cast<double>(n) / density);
    const Rect bounds{{0.0, 0.0}, {side, side * rng.uniform(0.5, 2.0)}};
    std::vector<AgentMessage> msgs(n);
    for (std::size_t i = 0; i < n; ++i) {
      // A few agents stray outside the bounds to exercise clamping.
      const double slack = (i % 17 == 0) ? 0.3 * r_obs : 0.0;
      msgs[i] = {i * 3 + 1,
                 {rng.uniform(bounds.min.x - slack, bounds.max.x + slack),
                  rng.uniform(bounds.min.y - slack, bounds.max.y + slack)},
                 {0.0, 0.0},
                 0.5};
    }
    const SpatialGrid grid(msgs, bounds, r_obs);
    bool all_match = true;
    std::size_t bad = 0;
    for (const AgentMessage& self : msgs) {
      std::vector<NeighborView> got = query_neighbors(grid, self, r_obs, msgs.size());
      std::vector<std::size_t> ids;
      for (const NeighborView& v : got) {
        ids.push_back(v.neighbor_id);
      }
      std::sort(ids.begin(), ids.end());
      if (ids != oracle::neighbors_all_pairs(msgs, self, r_obs)) {
        all_match = false;
        bad = self.agent_id;
        break;
      }
    }
    std::ostringstream what;
    what << "config " << c << " (" << n << " agents): mismatch at agent " << bad;
    res.record(all_match, what.str());
  }
  return res;
}

/// Two agents taking any velocities inside their mutual half-planes stay at
/// least a combined radius apart over the horizon.
inline SuiteResult orca_pair_suite(std::size_t pairs, std::uint64_t seed,
                                   std::size_t samples = 1000) {
  SuiteResult res;
  CounterRng rng(hash_combine(seed, 0x44));
  for (std::size_t i = 0; i < pairs; ++i) {
    const double ra = rng.uniform(0.2, 1.0);
    const double rb = rng.uniform(0.2, 1.0);
    const double r = ra + rb;
    const Vec2 pa{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
    const Vec2 pb = pa + random_unit(rng) * rng.uniform(r * 1.0001, 20.0);
    const Vec2 va = random_unit(rng) * rng.uniform(0.0, 2.0);
    const Vec2 vb = random_unit(rng) * rng.uniform(0.0, 2.0);
    OrcaParams params;
    params.time_horizon = rng.uniform(1.0, 10.0);
    params.dt = 0.1;
    params.responsibility = 0.5;

    const HalfPlane ha = orca_halfplane(va, {pb - pa, vb, r, 1}, params);
    const HalfPlane hb = orca_halfplane(vb, {pa - pb, va, r, 0}, params);
    const auto pick = [&](const HalfPlane& hp) {
      const double inward = rng.next_unit() < 0.25 ? 0.0 : rng.uniform(0.0, 2.0);
      return hp.point + hp.normal * inward + hp.direction() * rng.uniform(-2.0, 2.0);
    };
    const Vec2 na = pick(ha);
    const Vec2 nb = pick(hb);
    const double d = oracle::sampled_min_distance(pa, na, pb, nb, params.time_horizon, samples);
    res.worst = std::max(res.worst, r - d);
    std::ostringstream what;
    what << "pair " << i << ": min distance " << d << " < combined radius " << r;
    res.record(d >= r - kPairTolerance, what.str());
  }
  return res;
}

/// Trace bytes of a short two-way run for each worker count must agree.
inline SuiteResult determinism_suite(std::size_t agents_per_side, std::size_t steps,
                                     const std::vector<std::size_t>& workers, std::uint64_t seed) {
  SuiteResult res;
  const Scenario scenario = generate_two_way(agents_per_side, false, seed);
  std::string reference;
  for (std::size_t w : workers) {
    SimParams params = resolve_params(scenario);
    params.worker_count = w;
    params.rng_seed = seed;
    params.step_cap = steps;
    std::ostringstream out;
    run_scenario(scenario, params, &out);
    const std::string bytes = out.str();
    if (reference.empty()) {
      reference = bytes;
      res.record(true, "");
      continue;
    }
    res.record(bytes == reference, "trace differs with " + std::to_string(w) + " workers");
  }
  return res;
}

}  // namespace crowdsim::validation
