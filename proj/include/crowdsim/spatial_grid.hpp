#pragma once

// Uniform-grid message store for neighbor observation. Agents post one
// message each; a reader scans its own cell and the eight around it. With
// cell_size >= r_obs that 3x3 block always covers the observation disc.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "crowdsim/error.hpp"
#include "crowdsim/geometry.hpp"
#include "crowdsim/orca.hpp"

namespace crowdsim {

struct AgentMessage {
  std::size_t agent_id = 0;
  Vec2 position;
  Vec2 velocity;
  double radius = 0.0;

  bool operator==(const AgentMessage&) const = default;
};

struct CellIndex {
  std::size_t col = 0;
  std::size_t row = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Messages bucketed by cell in CSR layout: cell c holds
/// messages[cell_start[c] .. cell_start[c + 1]), sorted by agent_id.
class SpatialGrid {
 public:
  SpatialGrid() = default;

  /// Throws kEmptyWorld for zero-area bounds and kValidationError for a
  /// non-positive observation radius.
  SpatialGrid(std::span<const AgentMessage> messages, const Rect& world_bounds, double r_obs) {
    if (!(world_bounds.width() > 0.0) || !(world_bounds.height() > 0.0)) {
      throw Error(ErrorCode::kEmptyWorld, "world bounds have zero area");
    }
    if (!(r_obs > 0.0)) {
      throw Error(ErrorCode::kValidationError, "observation radius must be positive");
    }
    origin_ = world_bounds.min;
    cell_size_ = r_obs;
    cols_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(world_bounds.width() / r_obs)));
    rows_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(world_bounds.height() / r_obs)));

    std::vector<std::size_t> cell_of(messages.size());
    cell_start_.assign(cols_ * rows_ + 1, 0);
    for (std::size_t i = 0; i < messages.size(); ++i) {
      const CellIndex c = cell_for(messages[i].position);
      cell_of[i] = c.row * cols_ + c.col;
      ++cell_start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c + 1 < cell_start_.size(); ++c) {
      cell_start_[c + 1] += cell_start_[c];
    }
    messages_.resize(messages.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < messages.size(); ++i) {
      messages_[fill[cell_of[i]]++] = messages[i];
    }
    for (std::size_t c = 0; c + 1 < cell_start_.size(); ++c) {
      std::sort(messages_.begin() + static_cast<std::ptrdiff_t>(cell_start_[c]),
                messages_.begin() + static_cast<std::ptrdiff_t>(cell_start_[c + 1]),
                [](const AgentMessage& a, const AgentMessage& b) { return a.agent_id < b.agent_id; });
    }
  }

  Vec2 origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }

  /// Cell containing p: floor convention (right-open cells), clamped into the grid.
  CellIndex cell_for(const Vec2& p) const {
    return {clamp_index((p.x - origin_.x) / cell_size_, cols_),
            clamp_index((p.y - origin_.y) / cell_size_, rows_)};
  }

  std::span<const AgentMessage> bin(std::size_t col, std::size_t row) const {
    const std::size_t c = row * cols_ + col;
    return {messages_.data() + cell_start_[c], cell_start_[c + 1] - cell_start_[c]};
  }

  std::span<const AgentMessage> messages() const { return messages_; }

  /// Calls fn(message) for every message in the 3x3 block around `cell`.
  template <typename Fn>
  void for_each_near(const CellIndex& cell, Fn&& fn) const {
    const std::size_t col_lo = cell.col == 0 ? 0 : cell.col - 1;
    const std::size_t row_lo = cell.row == 0 ? 0 : cell.row - 1;
    const std::size_t col_hi = std::min(cols_ - 1, cell.col + 1);
    const std::size_t row_hi = std::min(rows_ - 1, cell.row + 1);
    for (std::size_t row = row_lo; row <= row_hi; ++row) {
      const std::size_t first = row * cols_ + col_lo;
      const std::size_t last = row * cols_ + col_hi;
      for (std::size_t k = cell_start_[first]; k < cell_start_[last + 1]; ++k) {
        fn(messages_[k]);
      }
    }
  }

  bool operator==(const SpatialGrid&) const = default;

 private:
  static std::size_t clamp_index(double scaled, std::size_t count) {
    const double f = std::floor(scaled);
    if (!(f > 0.0)) {
      return 0;
    }
    if (f >= static_cast<double>(count - 1)) {
      return count - 1;
    }
    return static_cast<std::size_t>(f);
  }

  Vec2 origin_;
  double cell_size_ = 1.0;
  std::size_t cols_ = 1;
  std::size_t rows_ = 1;
  std::vector<std::size_t> cell_start_;
  std::vector<AgentMessage> messages_;
};

inline SpatialGrid build_grid(std::span<const AgentMessage> messages, const Rect& world_bounds,
                              double r_obs) {
  return SpatialGrid(messages, world_bounds, r_obs);
}

/// Messages strictly within r_obs of `self` (excluding self), nearest first,
/// ties by agent_id, truncated to `cap`, as seen from `self`.
inline std::vector<NeighborView> query_neighbors(const SpatialGrid& grid, const AgentMessage& self,
                                                 double r_obs, std::size_t cap) {
  struct Candidate {
    double dist_sq;
    const AgentMessage* msg;
  };
  thread_local std::vector<Candidate> candidates;
  candidates.clear();

  const double r_obs_sq = r_obs * r_obs;
  grid.for_each_near(grid.cell_for(self.position), [&](const AgentMessage& m) {
    if (m.agent_id == self.agent_id) {
      return;
    }
    const double d = abs_sq(m.position - self.position);
    if (d < r_obs_sq) {
      candidates.push_back({d, &m});
    }
  });

  const auto nearer = [](const Candidate& a, const Candidate& b) {
    if (a.dist_sq != b.dist_sq) {
      return a.dist_sq < b.dist_sq;
    }
    return a.msg->agent_id < b.msg->agent_id;
  };
  const std::size_t keep = std::min(cap, candidates.size());
  if (keep < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                     candidates.end(), nearer);
  }
  std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), nearer);

  std::vector<NeighborView> out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const AgentMessage& m = *candidates[k].msg;
    out.push_back(NeighborView{m.position - self.position, m.velocity, self.radius + m.radius,
                               m.agent_id});
  }
  return out;
}

}  // namespace crowdsim
