#pragma once

// Two-dimensional linear programs of the form
//
//   minimize ||v - preferred||  subject to  (v - p_i) . n_i >= 0,  ||v|| <= max_speed
//
// solved with Seidel's randomized incremental method. The max-speed disc is
// kept as a true disc: every 1-D re-solve intersects its line with the disc
// before clipping against earlier constraints. When the 2-D program is empty
// a 3-D incremental pass finds the velocity of least maximum penetration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/random.hpp"

namespace crowdsim {

inline constexpr double kFeasibilityTolerance = 1e-9;

struct LpProblem {
  std::vector<HalfPlane> constraints;
  Vec2 preferred;
  double max_speed = 0.0;
  std::uint64_t problem_id = 0;
};

struct LpSolution {
  Vec2 velocity;
  bool feasible = true;
  // Original index of the constraint at which the 2-D program became empty.
  std::optional<std::size_t> failed_at;

  bool operator==(const LpSolution&) const = default;
};

/// Per-problem shuffle key derived from the batch seed.
constexpr std::uint64_t shuffle_seed_for(std::uint64_t rng_seed, std::uint64_t problem_id) {
  return hash_combine(rng_seed, problem_id);
}

namespace detail {

inline constexpr double kParallelEpsilon = 1e-10;

/// Feasible parameter range [left, right] along a constraint boundary,
/// parameterised as point + t * direction.
struct LineInterval {
  double left = -std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  bool empty = false;

  void merge(const LineInterval& other) {
    empty = empty || other.empty;
    left = std::max(left, other.left);
    right = std::min(right, other.right);
  }
};

/// Intersection of the boundary of `line` with the disc of the given radius.
inline LineInterval disc_interval(const HalfPlane& line, double radius) {
  const Vec2 dir = line.direction();
  const double along = dot(line.point, dir);
  const double discriminant = along * along + radius * radius - abs_sq(line.point);
  LineInterval interval;
  if (discriminant < 0.0) {
    interval.empty = true;
    return interval;
  }
  const double root = std::sqrt(discriminant);
  interval.left = -along - root;
  interval.right = -along + root;
  return interval;
}

/// Clips the boundary of `line` against every half-plane in `others`. This is
/// the unit of work the batch solver distributes: the result for a range is
/// order-free (a max, a min and an or), so any split reduces to the same bits.
inline LineInterval clip_line(const HalfPlane& line, std::span<const HalfPlane> others) {
  const Vec2 dir = line.direction();
  LineInterval interval;
  for (const HalfPlane& other : others) {
    const Vec2 other_dir = other.direction();
    const double denominator = det(dir, other_dir);
    const double numerator = det(other_dir, line.point - other.point);

    if (std::fabs(denominator) <= kParallelEpsilon) {
      // Parallel: either `other` holds everywhere on the line or nowhere.
      if (numerator < 0.0) {
        interval.empty = true;
        return interval;
      }
      continue;
    }

    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      interval.right = std::min(interval.right, t);
    } else {
      interval.left = std::max(interval.left, t);
    }
    if (interval.left > interval.right) {
      interval.empty = true;
      return interval;
    }
  }
  return interval;
}

/// Chooses the optimum on a non-empty interval of the line. With
/// direction_opt the objective is "go as far along target as possible",
/// otherwise "closest point to target".
inline Vec2 pick_on_line(const HalfPlane& line, const LineInterval& interval, const Vec2& target,
                         bool direction_opt) {
  const Vec2 dir = line.direction();
  if (direction_opt) {
    return dot(target, dir) > 0.0 ? line.point + interval.right * dir
                                  : line.point + interval.left * dir;
  }
  const double t = std::clamp(dot(dir, target - line.point), interval.left, interval.right);
  return line.point + t * dir;
}

/// Combines the disc range with a clipped range; nullopt if empty.
inline std::optional<Vec2> finish_line(const HalfPlane& line, LineInterval disc,
                                       const LineInterval& clipped, const Vec2& target,
                                       bool direction_opt) {
  disc.merge(clipped);
  if (disc.empty || disc.left > disc.right) {
    return std::nullopt;
  }
  return pick_on_line(line, disc, target, direction_opt);
}

/// Sequential 1-D re-solve on the boundary of lines[index], respecting
/// lines[0, index) and the disc.
inline std::optional<Vec2> solve_line(std::span<const HalfPlane> lines, std::size_t index,
                                      double radius, const Vec2& target, bool direction_opt) {
  const LineInterval disc = disc_interval(lines[index], radius);
  if (disc.empty) {
    return std::nullopt;
  }
  return finish_line(lines[index], disc, clip_line(lines[index], lines.first(index)), target,
                     direction_opt);
}

inline Vec2 initial_optimum(const Vec2& target, double radius, bool direction_opt) {
  if (direction_opt) {
    return target * radius;  // target is a unit direction here
  }
  return clip_length(target, radius);
}

/// Incremental 2-D pass. `line_solver(i, target)` performs the 1-D re-solve for
/// constraint i. Returns the position of the first failure, or lines.size().
/// On failure `result` keeps the last feasible optimum.
template <typename LineSolver>
std::size_t solve_2d_with(std::span<const HalfPlane> lines, double radius, const Vec2& target,
                          bool direction_opt, Vec2& result, LineSolver&& line_solver) {
  result = initial_optimum(target, radius, direction_opt);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (signed_distance(lines[i], result) < 0.0) {
      const std::optional<Vec2> next = line_solver(i);
      if (!next) {
        return i;
      }
      result = *next;
    }
  }
  return lines.size();
}

inline std::size_t solve_2d(std::span<const HalfPlane> lines, double radius, const Vec2& target,
                            bool direction_opt, Vec2& result) {
  return solve_2d_with(lines, radius, target, direction_opt, result, [&](std::size_t i) {
    return solve_line(lines, i, radius, target, direction_opt);
  });
}

/// Largest violation over all constraints, clamped below at zero.
inline double max_penetration(std::span<const HalfPlane> lines, const Vec2& v) {
  double worst = 0.0;
  for (const HalfPlane& hp : lines) {
    worst = std::max(worst, -signed_distance(hp, v));
  }
  return worst;
}

/// 3-D incremental pass over (v, penetration) starting at position `begin`;
/// lines before `begin` are satisfied by `result` on entry.
inline Vec2 minimize_penetration(std::span<const HalfPlane> lines, std::size_t begin,
                                 double radius, Vec2 result) {
  double distance = 0.0;
  std::vector<HalfPlane> projected;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (-signed_distance(lines[i], result) <= distance) {
      continue;
    }
    const HalfPlane& line = lines[i];
    const Vec2 dir = line.direction();
    projected.clear();
    for (std::size_t j = 0; j < i; ++j) {
      const HalfPlane& other = lines[j];
      const Vec2 other_dir = other.direction();
      const double determinant = det(dir, other_dir);
      Vec2 point;
      if (std::fabs(determinant) <= kParallelEpsilon) {
        if (dot(dir, other_dir) > 0.0) {
          continue;  // same orientation; the other constraint is never tighter here
        }
        point = 0.5 * (line.point + other.point);
      } else {
        point = line.point + (det(other_dir, line.point - other.point) / determinant) * dir;
      }
      // Bisector where both constraints are violated by the same amount.
      const Vec2 bisector_dir = normalize(other_dir - dir);
      projected.push_back(HalfPlane{point, perp(bisector_dir)});
    }

    const Vec2 incumbent = result;
    if (solve_2d(projected, radius, line.normal, true, result) < projected.size()) {
      // Only reachable through rounding: the incumbent is feasible for the
      // projected program by construction.
      result = incumbent;
    }
    distance = -signed_distance(line, result);
  }
  return result;
}

inline std::vector<std::size_t> shuffled_order(std::size_t count, std::uint64_t shuffle_seed) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(shuffle_seed);
  shuffle(std::span<std::size_t>(order), rng);
  return order;
}

inline void permute_into(std::span<const HalfPlane> source, std::span<const std::size_t> order,
                         std::vector<HalfPlane>& out) {
  out.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out[k] = source[order[k]];
  }
}

inline constexpr double kTieBreakSlack = 1e-10;

/// Least-penetration solve on constraints already in processing order.
inline Vec2 least_penetration_ordered(std::span<const HalfPlane> ordered, std::size_t begin,
                                      double radius, const Vec2& start) {
  const Vec2 extreme = minimize_penetration(ordered, begin, radius, clip_length(start, radius));
  const double best = max_penetration(ordered, extreme);

  // The minimizer set is {v : every penetration <= best}; pick its member
  // nearest to the start velocity.
  const double shift = best + kTieBreakSlack;
  std::vector<HalfPlane> relaxed(ordered.begin(), ordered.end());
  for (HalfPlane& hp : relaxed) {
    hp.point -= shift * hp.normal;
  }
  Vec2 nearest;
  if (solve_2d(relaxed, radius, start, false, nearest) == relaxed.size() &&
      max_penetration(ordered, nearest) <= best + 2.0 * kTieBreakSlack) {
    return nearest;
  }
  return extreme;
}

}  // namespace detail

/// 1-D step of the incremental method: the point on the boundary of
/// constraints[constraint_index] closest to the preferred velocity, subject to
/// the disc and to all constraints with a smaller index. nullopt means the
/// program restricted to constraints [0, constraint_index] is empty.
inline std::optional<Vec2> solve_on_line(const LpProblem& problem, std::size_t constraint_index) {
  return detail::solve_line(problem.constraints, constraint_index, problem.max_speed,
                            problem.preferred, false);
}

/// Seidel's incremental solve with constraints in a seeded random order.
inline LpSolution solve_incremental_2d(const LpProblem& problem, std::uint64_t shuffle_seed) {
  const std::vector<std::size_t> order =
      detail::shuffled_order(problem.constraints.size(), shuffle_seed);
  std::vector<HalfPlane> ordered;
  detail::permute_into(problem.constraints, order, ordered);

  LpSolution solution;
  const std::size_t fail =
      detail::solve_2d(ordered, problem.max_speed, problem.preferred, false, solution.velocity);
  if (fail < ordered.size()) {
    solution.feasible = false;
    solution.failed_at = order[fail];
  }
  return solution;
}

/// Velocity within the disc that minimizes the largest constraint violation,
/// ties broken by proximity to start.velocity. The 3-D pass resumes at the
/// position where `start` failed in the order given by `shuffle_seed`.
inline Vec2 solve_least_penetration(const LpProblem& problem, const LpSolution& start,
                                    std::uint64_t shuffle_seed) {
  const std::vector<std::size_t> order =
      detail::shuffled_order(problem.constraints.size(), shuffle_seed);
  std::vector<HalfPlane> ordered;
  detail::permute_into(problem.constraints, order, ordered);

  std::size_t begin = 0;
  if (start.failed_at) {
    const auto it = std::find(order.begin(), order.end(), *start.failed_at);
    if (it != order.end()) {
      begin = static_cast<std::size_t>(it - order.begin());
    }
  }
  return detail::least_penetration_ordered(ordered, begin, problem.max_speed, start.velocity);
}

/// Incremental solve followed by the least-penetration fallback when needed.
inline LpSolution solve(const LpProblem& problem, std::uint64_t shuffle_seed) {
  LpSolution solution = solve_incremental_2d(problem, shuffle_seed);
  if (!solution.feasible) {
    solution.velocity = solve_least_penetration(problem, solution, shuffle_seed);
  }
  return solution;
}

}  // namespace crowdsim
