#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "crowdsim/error.hpp"
#include "crowdsim/geometry.hpp"

namespace crowdsim {

struct OrcaParams {
  double time_horizon = 5.0;  // s
  double dt = 0.1;            // s, horizon used when the discs already overlap
  double responsibility = 0.5;
};

/// What an agent observes about one neighbor.
struct NeighborView {
  Vec2 relative_position;  // neighbor minus self (m)
  Vec2 neighbor_velocity;  // m/s
  double combined_radius = 0.0;
  std::size_t neighbor_id = 0;
};

/// Smallest change u of the relative velocity that puts it on the boundary of
/// the velocity obstacle, together with the outward boundary normal.
struct VelocityAdjustment {
  Vec2 u;
  Vec2 normal;
};

/// The velocity obstacle of a neighbor at `relative_position` is the set of
/// relative velocities that bring the two discs into contact within the
/// horizon: a cone from the origin tangent to the disc of radius r around
/// relative_position, cut off by the disc of radius r/tau around
/// relative_position/tau. When the discs already overlap the obstacle used
/// is the disc of radius r/dt around relative_position/dt, i.e. the agents are
/// asked to separate within one step.
inline VelocityAdjustment velocity_adjustment(const Vec2& relative_velocity,
                                              const NeighborView& nb, const OrcaParams& params) {
  const Vec2& rel_pos = nb.relative_position;
  const double dist_sq = abs_sq(rel_pos);
  const double r = nb.combined_radius;
  const double r_sq = r * r;

  if (dist_sq < kMinNormalizable * kMinNormalizable) {
    throw Error(ErrorCode::kDegenerateOverlap, "coincident agent centers");
  }

  if (dist_sq > r_sq) {
    const double inv_tau = 1.0 / params.time_horizon;
    // From the cutoff-disc center to the relative velocity.
    const Vec2 w = relative_velocity - inv_tau * rel_pos;
    const double w_length_sq = abs_sq(w);
    const double w_dot_p = dot(w, rel_pos);

    if (w_dot_p < 0.0 && w_dot_p * w_dot_p > r_sq * w_length_sq) {
      const double w_length = std::sqrt(w_length_sq);
      const Vec2 unit_w = w / w_length;
      return {(r * inv_tau - w_length) * unit_w, unit_w};
    }

    // Nearest tangent leg.
    const double leg = std::sqrt(dist_sq - r_sq);
    Vec2 leg_dir;
    if (det(rel_pos, w) > 0.0) {
      leg_dir = Vec2(rel_pos.x * leg - rel_pos.y * r, rel_pos.x * r + rel_pos.y * leg) / dist_sq;
    } else {
      leg_dir = -Vec2(rel_pos.x * leg + rel_pos.y * r, -rel_pos.x * r + rel_pos.y * leg) / dist_sq;
    }
    const Vec2 u = dot(relative_velocity, leg_dir) * leg_dir - relative_velocity;
    // Permitted side lies to the left of leg_dir, away from the cone.
    return {u, perp(leg_dir)};
  }

  const double inv_dt = 1.0 / params.dt;
  const Vec2 w = relative_velocity - inv_dt * rel_pos;
  const double w_length = abs(w);
  if (w_length < kMinNormalizable) {
    // Relative velocity exactly at the one-step cutoff center; push straight
    // away from the neighbor.
    const Vec2 away = -(rel_pos / std::sqrt(dist_sq));
    return {r * inv_dt * away, away};
  }
  const Vec2 unit_w = w / w_length;
  return {(r * inv_dt - w_length) * unit_w, unit_w};
}

/// Half-plane of velocities permitted to the agent with respect to one
/// neighbor. The agent takes `responsibility` of the adjustment.
/// Throws kDegenerateOverlap for coincident centers.
inline HalfPlane orca_halfplane(const Vec2& self_velocity, const NeighborView& nb,
                                const OrcaParams& params) {
  const Vec2 relative_velocity = self_velocity - nb.neighbor_velocity;
  const VelocityAdjustment adj = velocity_adjustment(relative_velocity, nb, params);
  return HalfPlane{self_velocity + params.responsibility * adj.u, adj.normal};
}

struct ConstraintSet {
  std::vector<HalfPlane> halfplanes;
  std::size_t skipped_degenerate = 0;
};

/// One half-plane per neighbor, nearest neighbor first, at most `cap` entries.
/// Neighbors with coincident centers are skipped and counted.
inline ConstraintSet build_constraints(const Vec2& self_velocity,
                                       std::span<const NeighborView> neighbors,
                                       const OrcaParams& params, std::size_t cap) {
  std::vector<const NeighborView*> sorted;
  sorted.reserve(neighbors.size());
  for (const NeighborView& nb : neighbors) {
    sorted.push_back(&nb);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const NeighborView* a, const NeighborView* b) {
    const double da = abs_sq(a->relative_position);
    const double db = abs_sq(b->relative_position);
    if (da != db) {
      return da < db;
    }
    return a->neighbor_id < b->neighbor_id;
  });

  ConstraintSet out;
  out.halfplanes.reserve(std::min(cap, sorted.size()));
  for (const NeighborView* nb : sorted) {
    if (out.halfplanes.size() >= cap) {
      break;
    }
    if (abs_sq(nb->relative_position) < kMinNormalizable * kMinNormalizable) {
      ++out.skipped_degenerate;
      continue;
    }
    out.halfplanes.push_back(orca_halfplane(self_velocity, *nb, params));
  }
  return out;
}

}  // namespace crowdsim
