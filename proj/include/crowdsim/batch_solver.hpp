#pragma once

// Batch execution of many independent LP problems.
//
// Each worker starts on its own problem. The expensive branch of the
// incremental method, re-solving on a constraint boundary against all earlier
// constraints, is cut into work units of `work_unit_size` constraints. The
// owner publishes the job on its task deque and starts claiming units; any
// worker with nothing else to do claims units of the same job. Each unit
// produces a partial feasible interval, and the intervals reduce with
// max/min/or, so the result is bit-for-bit the sequential one no matter who
// computed which unit.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "crowdsim/lp_solver.hpp"
#include "crowdsim/worker_pool.hpp"

namespace crowdsim {

struct BatchConfig {
  std::size_t worker_count = 1;
  std::size_t work_unit_size = 8;  // constraints per unit
  std::uint64_t rng_seed = 0;
};

namespace detail {

/// One 1-D re-solve split into work units.
struct LineJob {
  const HalfPlane* line = nullptr;
  const HalfPlane* others = nullptr;  // constraints [0, index) in processing order
  std::uint32_t other_count = 0;
  std::uint32_t unit_size = 1;
  std::uint32_t unit_count = 0;
  LineInterval* partials = nullptr;

  std::atomic<std::uint32_t> next_unit{0};
  std::atomic<std::uint32_t> pending{0};
  std::atomic<std::uint32_t> visitors{0};

  /// Claims and computes units until none are left.
  void drain() {
    for (;;) {
      const std::uint32_t unit = next_unit.fetch_add(1, std::memory_order_relaxed);
      if (unit >= unit_count) {
        return;
      }
      const std::uint32_t begin = unit * unit_size;
      const std::uint32_t end = std::min(other_count, begin + unit_size);
      partials[unit] = clip_line(*line, std::span<const HalfPlane>(others + begin, end - begin));
      pending.fetch_sub(1, std::memory_order_release);
    }
  }

  static void run(void* self) { static_cast<LineJob*>(self)->drain(); }
};

struct BatchScratch {
  std::vector<std::size_t> order;
  std::vector<HalfPlane> ordered;
  std::vector<LineInterval> partials;
};

inline LineInterval clip_line_distributed(WorkerPool* pool, std::size_t worker,
                                          std::size_t unit_size, const HalfPlane& line,
                                          std::span<const HalfPlane> others,
                                          std::vector<LineInterval>& partials) {
  const std::size_t unit_count = (others.size() + unit_size - 1) / unit_size;
  if (pool == nullptr || pool->size() == 1 || unit_count <= 1) {
    return clip_line(line, others);
  }

  partials.assign(unit_count, LineInterval{});
  LineJob job;
  job.line = &line;
  job.others = others.data();
  job.other_count = static_cast<std::uint32_t>(others.size());
  job.unit_size = static_cast<std::uint32_t>(unit_size);
  job.unit_count = static_cast<std::uint32_t>(unit_count);
  job.partials = partials.data();
  job.pending.store(job.unit_count, std::memory_order_relaxed);

  pool->publish(worker, SharedTask{&LineJob::run, &job, &job.visitors});
  job.drain();
  while (job.pending.load(std::memory_order_acquire) != 0) {
    if (!pool->run_one(worker)) {
      std::this_thread::yield();
    }
  }
  pool->retract(worker);
  while (job.visitors.load(std::memory_order_acquire) != 0) {
    std::this_thread::yield();
  }

  LineInterval merged;
  for (const LineInterval& part : partials) {
    merged.merge(part);
  }
  return merged;
}

inline LpSolution solve_one(const LpProblem& problem, std::uint64_t rng_seed, WorkerPool* pool,
                            std::size_t worker, std::size_t unit_size, BatchScratch& scratch) {
  const std::uint64_t seed = shuffle_seed_for(rng_seed, problem.problem_id);
  scratch.order = shuffled_order(problem.constraints.size(), seed);
  permute_into(problem.constraints, scratch.order, scratch.ordered);
  const std::span<const HalfPlane> lines(scratch.ordered);
  const double radius = problem.max_speed;

  LpSolution solution;
  const std::size_t fail = solve_2d_with(
      lines, radius, problem.preferred, false, solution.velocity,
      [&](std::size_t i) -> std::optional<Vec2> {
        const LineInterval disc = disc_interval(lines[i], radius);
        if (disc.empty) {
          return std::nullopt;
        }
        const LineInterval clipped = clip_line_distributed(pool, worker, unit_size, lines[i],
                                                           lines.first(i), scratch.partials);
        return finish_line(lines[i], disc, clipped, problem.preferred, false);
      });

  if (fail < lines.size()) {
    solution.feasible = false;
    solution.failed_at = scratch.order[fail];
    solution.velocity = least_penetration_ordered(lines, fail, radius, solution.velocity);
  }
  return solution;
}

}  // namespace detail

/// Solves every problem on an existing pool. Output is index-aligned with the
/// input and independent of the pool size.
inline std::vector<LpSolution> solve_batch(WorkerPool& pool, std::span<const LpProblem> problems,
                                           const BatchConfig& cfg) {
  const std::size_t unit_size = std::max<std::size_t>(cfg.work_unit_size, 1);
  std::vector<LpSolution> solutions(problems.size());
  std::vector<detail::BatchScratch> scratch(pool.size());
  pool.parallel_for(problems.size(), 16, [&](std::size_t i, std::size_t worker) {
    solutions[i] =
        detail::solve_one(problems[i], cfg.rng_seed, &pool, worker, unit_size, scratch[worker]);
  });
  return solutions;
}

inline std::vector<LpSolution> solve_batch(std::span<const LpProblem> problems,
                                           const BatchConfig& cfg) {
  WorkerPool pool(std::max<std::size_t>(cfg.worker_count, 1));
  return solve_batch(pool, problems, cfg);
}

}  // namespace crowdsim
