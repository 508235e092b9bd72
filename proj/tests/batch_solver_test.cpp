#include <gtest/gtest.h>

#include <bit>
#include <vector>

#include "crowdsim/batch_solver.hpp"
#include "crowdsim/validation.hpp"

using namespace crowdsim;

namespace {

bool bitwise_equal(const LpSolution& a, const LpSolution& b) {
  return std::bit_cast<std::uint64_t>(a.velocity.x) == std::bit_cast<std::uint64_t>(b.velocity.x) &&
         std::bit_cast<std::uint64_t>(a.velocity.y) == std::bit_cast<std::uint64_t>(b.velocity.y) &&
         a.feasible == b.feasible && a.failed_at == b.failed_at;
}

std::vector<LpProblem> random_batch(std::size_t n, std::size_t max_constraints, std::uint64_t seed,
                                    bool feasible_only) {
  CounterRng rng(seed);
  std::vector<LpProblem> out;
  std::uint64_t id = 0;
  while (out.size() < n) {
    LpProblem p = validation::random_lp(rng, max_constraints, id++);
    if (feasible_only && !solve_incremental_2d(p, 0).feasible) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST(SolveBatch, BatchOfOneMatchesSequentialSolve) {
  const std::vector<LpProblem> one = random_batch(1, 20, 4, true);
  const BatchConfig cfg{1, 8, 77};
  const std::vector<LpSolution> got = solve_batch(one, cfg);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_TRUE(bitwise_equal(got[0], solve_incremental_2d(one[0], shuffle_seed_for(77, one[0].problem_id))));
}

TEST(SolveBatch, EmptyBatch) {
  EXPECT_TRUE(solve_batch(std::span<const LpProblem>{}, BatchConfig{}).empty());
}

TEST(SolveBatch, BitwiseIdenticalAcrossWorkerCounts) {
  const std::vector<LpProblem> problems = random_batch(1000, 32, 12, true);
  std::vector<std::vector<LpSolution>> results;
  for (std::size_t workers : {1u, 4u, 8u}) {
    results.push_back(solve_batch(problems, BatchConfig{workers, 8, 5}));
  }
  for (std::size_t i = 0; i < problems.size(); ++i) {
    EXPECT_TRUE(bitwise_equal(results[0][i], results[1][i])) << i;
    EXPECT_TRUE(bitwise_equal(results[0][i], results[2][i])) << i;
  }
}

TEST(SolveBatch, SmallWorkUnitsDoNotChangeResults) {
  // Unit size 1 forces every 1-D clip to be split across many units.
  const std::vector<LpProblem> problems = random_batch(300, 32, 13, false);
  const std::vector<LpSolution> coarse = solve_batch(problems, BatchConfig{1, 64, 9});
  for (std::size_t unit : {1u, 3u}) {
    const std::vector<LpSolution> fine = solve_batch(problems, BatchConfig{8, unit, 9});
    for (std::size_t i = 0; i < problems.size(); ++i) {
      EXPECT_TRUE(bitwise_equal(coarse[i], fine[i])) << "unit " << unit << " problem " << i;
    }
  }
}

TEST(SolveBatch, MixedBatchMatchesSequentialReference) {
  CounterRng rng(31);
  std::vector<LpProblem> problems = random_batch(900, 16, 14, true);
  for (std::uint64_t i = 0; i < 100; ++i) {
    problems.push_back(validation::random_infeasible_lp(rng, 10000 + i));
  }
  const std::vector<LpSolution> got = solve_batch(problems, BatchConfig{4, 4, 123});
  std::size_t infeasible = 0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const LpSolution ref = solve(problems[i], shuffle_seed_for(123, problems[i].problem_id));
    EXPECT_EQ(got[i].feasible, ref.feasible) << i;
    EXPECT_TRUE(bitwise_equal(got[i], ref)) << i;
    infeasible += got[i].feasible ? 0 : 1;
  }
  EXPECT_EQ(infeasible, 100u);
}

TEST(SolveBatch, OutputIsAPureFunctionOfSeed) {
  const std::vector<LpProblem> problems = random_batch(200, 32, 15, false);
  const std::vector<LpSolution> a = solve_batch(problems, BatchConfig{2, 8, 1});
  const std::vector<LpSolution> b = solve_batch(problems, BatchConfig{2, 8, 1});
  for (std::size_t i = 0; i < problems.size(); ++i) {
    EXPECT_TRUE(bitwise_equal(a[i], b[i]));
  }
}

TEST(WorkerPool, ParallelForVisitsEveryIndexOnce) {
  WorkerPool pool(4);
  EXPECT_EQ(pool.size(), 4u);
  std::vector<int> hits(10007, 0);
  pool.parallel_for(hits.size(), 7, [&](std::size_t i, std::size_t worker) {
    EXPECT_LT(worker, 4u);
    ++hits[i];
  });
  for (int h : hits) {
    ASSERT_EQ(h, 1);
  }
  // Reusable across jobs.
  std::atomic<std::size_t> sum{0};
  pool.parallel_for(100, 1, [&](std::size_t i, std::size_t) { sum += i; });
  EXPECT_EQ(sum.load(), 4950u);
}
