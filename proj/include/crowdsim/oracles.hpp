#pragma once

// Brute-force reference computations used by the validation suites. None of
// these share code with the solvers they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/spatial_grid.hpp"

namespace crowdsim::oracle {

/// Nearest feasible point to `preferred` by enumerating every candidate an
/// optimum can sit on: the disc-clipped preferred point, the foot of
/// `preferred` on each constraint line, pairwise line intersections and
/// line-disc intersections. nullopt if no candidate is feasible.
inline std::optional<Vec2> lp_vertex_enumeration(std::span<const HalfPlane> constraints,
                                                 const Vec2& preferred, double max_speed,
                                                 double tolerance = 1e-9) {
  std::vector<Vec2> candidates;
  const double pref_len = std::hypot(preferred.x, preferred.y);
  candidates.push_back(pref_len > max_speed ? preferred * (max_speed / pref_len) : preferred);

  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const Vec2 n = constraints[i].normal;
    const Vec2 p = constraints[i].point;
    // Foot of the perpendicular from preferred.
    candidates.push_back(preferred - n * ((preferred.x - p.x) * n.x + (preferred.y - p.y) * n.y));
    // Line: {v : v.n = c}. Closest point to origin is c n; half chord along t.
    const double c = p.x * n.x + p.y * n.y;
    const double h_sq = max_speed * max_speed - c * c;
    if (h_sq >= 0.0) {
      const Vec2 t{-n.y, n.x};
      const double h = std::sqrt(h_sq);
      candidates.push_back(n * c + t * h);
      candidates.push_back(n * c - t * h);
    }
    for (std::size_t j = i + 1; j < constraints.size(); ++j) {
      const Vec2 m = constraints[j].normal;
      const double d = constraints[j].point.x * m.x + constraints[j].point.y * m.y;
      const double denom = n.x * m.y - n.y * m.x;
      if (std::fabs(denom) < 1e-14) {
        continue;
      }
      // Cramer's rule on [n; m] v = [c; d].
      candidates.push_back({(c * m.y - n.y * d) / denom, (n.x * d - c * m.x) / denom});
    }
  }

  std::optional<Vec2> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Vec2& v : candidates) {
    if (std::hypot(v.x, v.y) > max_speed + tolerance) {
      continue;
    }
    bool ok = true;
    for (const HalfPlane& hp : constraints) {
      if ((v.x - hp.point.x) * hp.normal.x + (v.y - hp.point.y) * hp.normal.y < -tolerance) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      continue;
    }
    const double dist = std::hypot(v.x - preferred.x, v.y - preferred.y);
    if (dist < best_dist) {
      best_dist = dist;
      best = v;
    }
  }
  return best;
}

inline double max_penetration(std::span<const HalfPlane> constraints, const Vec2& v) {
  double worst = 0.0;
  for (const HalfPlane& hp : constraints) {
    worst = std::max(worst, -((v.x - hp.point.x) * hp.normal.x + (v.y - hp.point.y) * hp.normal.y));
  }
  return worst;
}

/// Smallest max-penetration over a square lattice of spacing `resolution`
/// restricted to the disc.
inline double grid_min_penetration(std::span<const HalfPlane> constraints, double max_speed,
                                   double resolution = 1e-3) {
  const long long steps = static_cast<long long>(std::floor(max_speed / resolution));
  double best = std::numeric_limits<double>::infinity();
  const double r_sq = max_speed * max_speed;
  std::vector<double> slope(constraints.size());
  std::vector<double> offset(constraints.size());
  for (long long iy = -steps; iy <= steps; ++iy) {
    const double y = static_cast<double>(iy) * resolution;
    // penetration_c(x, y) = offset_c - slope_c * x along this row
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      const HalfPlane& hp = constraints[c];
      slope[c] = hp.normal.x;
      offset[c] = -((y - hp.point.y) * hp.normal.y - hp.point.x * hp.normal.x);
    }
    const double half = std::sqrt(std::max(0.0, r_sq - y * y));
    const long long span = static_cast<long long>(std::floor(half / resolution));
    for (long long ix = -span; ix <= span; ++ix) {
      const double x = static_cast<double>(ix) * resolution;
      double worst = 0.0;
      for (std::size_t c = 0; c < constraints.size(); ++c) {
        worst = std::max(worst, offset[c] - slope[c] * x);
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

/// Ids of every message strictly within r_obs of `self`, excluding self,
/// by scanning all messages.
inline std::vector<std::size_t> neighbors_all_pairs(std::span<const AgentMessage> messages,
                                                    const AgentMessage& self, double r_obs) {
  std::vector<std::size_t> ids;
  for (const AgentMessage& m : messages) {
    if (m.agent_id == self.agent_id) {
      continue;
    }
    const double dx = m.position.x - self.position.x;
    const double dy = m.position.y - self.position.y;
    if (dx * dx + dy * dy < r_obs * r_obs) {
      ids.push_back(m.agent_id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

/// Minimum center distance of two discs moving at constant velocity, sampled
/// at `samples` + 1 evenly spaced instants of [0, horizon].
inline double sampled_min_distance(const Vec2& pa, const Vec2& va, const Vec2& pb, const Vec2& vb,
                                   double horizon, std::size_t samples) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(samples);
    const double dx = (pb.x + vb.x * t) - (pa.x + va.x * t);
    const double dy = (pb.y + vb.y * t) - (pa.y + va.y * t);
    best = std::min(best, std::hypot(dx, dy));
  }
  return best;
}

/// Signed clearance of relative velocity v against the truncated velocity
/// obstacle of a neighbor at `rel_pos`: the closest approach over [0, horizon]
/// minus `radius`. Zero on the obstacle boundary, negative inside.
inline double vo_clearance(const Vec2& v, const Vec2& rel_pos, double radius, double horizon) {
  const double vv = v.x * v.x + v.y * v.y;
  double t = 0.0;
  if (vv > 0.0) {
    t = std::clamp((v.x * rel_pos.x + v.y * rel_pos.y) / vv, 0.0, horizon);
  }
  return std::hypot(v.x * t - rel_pos.x, v.y * t - rel_pos.y) - radius;
}

}  // namespace crowdsim::oracle
