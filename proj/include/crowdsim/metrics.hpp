#pragma once

// Per-step crowd metrics as CSV:
//
//   step_index,active_count,mean_speed,collision_count,infeasible_count,wall_time_ms,lane_bands
//
// collision_count counts pairs closer than their combined radius minus 1e-3.
// lane_bands splits the plane into horizontal bands of `band_height` (aligned
// to y = 0) and counts the non-empty bands whose mean x-velocity exceeds half
// the mean desired speed of the agents in that band in magnitude.
// infeasible_count and wall_time_ms come from step reports and are left empty
// when none are supplied.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crowdsim/spatial_grid.hpp"
#include "crowdsim/trace.hpp"

namespace crowdsim {

inline constexpr const char* kMetricsCsvHeader =
    "step_index,active_count,mean_speed,collision_count,infeasible_count,wall_time_ms,lane_bands";

struct FrameMetrics {
  std::uint64_t step_index = 0;
  std::size_t active_count = 0;
  double mean_speed = 0.0;
  std::size_t collision_count = 0;
  std::size_t lane_bands = 0;
};

/// Computes the trace-derived metrics of one frame.
class MetricsCalculator {
 public:
  MetricsCalculator(const TraceHeader& header, double band_height) : band_height_(band_height) {
    for (const AgentStatic& a : header.agents) {
      statics_[a.agent_id] = a;
    }
  }

  FrameMetrics compute(const TraceFrame& frame) const {
    FrameMetrics m;
    m.step_index = frame.step_index;
    m.active_count = frame.records.size();
    if (frame.records.empty()) {
      return m;
    }

    struct Band {
      double sum_vx = 0.0;
      double sum_desired = 0.0;
      std::size_t count = 0;
    };
    std::map<long long, Band> bands;
    std::vector<AgentMessage> messages;
    messages.reserve(frame.records.size());
    double speed_sum = 0.0;
    double max_radius = 0.0;
    Rect box{frame.records.front().position, frame.records.front().position};
    for (const TraceRecord& r : frame.records) {
      const AgentStatic& s = lookup(r.agent_id);
      speed_sum += abs(r.velocity);
      Band& b = bands[static_cast<long long>(std::floor(r.position.y / band_height_))];
      b.sum_vx += r.velocity.x;
      b.sum_desired += s.desired_speed;
      ++b.count;
      messages.push_back({static_cast<std::size_t>(r.agent_id), r.position, r.velocity, s.radius});
      max_radius = std::max(max_radius, s.radius);
      box.min = {std::min(box.min.x, r.position.x), std::min(box.min.y, r.position.y)};
      box.max = {std::max(box.max.x, r.position.x), std::max(box.max.y, r.position.y)};
    }
    m.mean_speed = speed_sum / static_cast<double>(frame.records.size());
    for (const auto& [index, b] : bands) {
      const double n = static_cast<double>(b.count);
      if (std::fabs(b.sum_vx / n) > 0.5 * (b.sum_desired / n)) {
        ++m.lane_bands;
      }
    }

    box.min -= Vec2(1.0, 1.0);
    box.max += Vec2(1.0, 1.0);
    const SpatialGrid grid(messages, box, std::max(2.0 * max_radius, 1e-3));
    for (const AgentMessage& self : messages) {
      grid.for_each_near(grid.cell_for(self.position), [&](const AgentMessage& other) {
        if (other.agent_id <= self.agent_id) {
          return;
        }
        const double limit = self.radius + other.radius - kCollisionSlack;
        if (limit > 0.0 && abs_sq(other.position - self.position) < limit * limit) {
          ++m.collision_count;
        }
      });
    }
    return m;
  }

 private:
  const AgentStatic& lookup(std::uint64_t id) const {
    const auto it = statics_.find(id);
    if (it == statics_.end()) {
      throw Error(ErrorCode::kValidationError,
                  "trace record for agent " + std::to_string(id) + " missing from agent table");
    }
    return it->second;
  }

  double band_height_;
  std::unordered_map<std::uint64_t, AgentStatic> statics_;
};

inline std::string format_metrics_row(const FrameMetrics& m, const StepReport* report) {
  char buf[256];
  std::string infeasible;
  std::string wall;
  if (report != nullptr) {
    infeasible = std::to_string(report->infeasible_count);
    char w[64];
    std::snprintf(w, sizeof w, "%.6f", report->wall_time_ms);
    wall = w;
  }
  std::snprintf(buf, sizeof buf, "%llu,%zu,%.9f,%zu,%s,%s,%zu",
                static_cast<unsigned long long>(m.step_index), m.active_count, m.mean_speed,
                m.collision_count, infeasible.c_str(), wall.c_str(), m.lane_bands);
  return buf;
}

/// Metrics for every frame of a streamed trace; `reports` (optional) are
/// matched to frames by step_index.
inline std::string export_metrics(TraceReader& reader, std::span<const StepReport> reports = {},
                                  double band_height = 7.5) {
  std::unordered_map<std::size_t, const StepReport*> by_step;
  for (const StepReport& r : reports) {
    by_step[r.step_index] = &r;
  }
  const MetricsCalculator calc(reader.header(), band_height);
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  TraceFrame frame;
  while (reader.next(frame)) {
    const auto it = by_step.find(frame.step_index);
    out += format_metrics_row(calc.compute(frame), it == by_step.end() ? nullptr : it->second);
    out += "\n";
  }
  return out;
}

inline std::string export_metrics(const Trace& trace, std::span<const StepReport> reports = {},
                                  double band_height = 7.5) {
  std::unordered_map<std::size_t, const StepReport*> by_step;
  for (const StepReport& r : reports) {
    by_step[r.step_index] = &r;
  }
  const MetricsCalculator calc(trace.header, band_height);
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  for (const TraceFrame& frame : trace.frames) {
    const auto it = by_step.find(frame.step_index);
    out += format_metrics_row(calc.compute(frame), it == by_step.end() ? nullptr : it->second);
    out += "\n";
  }
  return out;
}

}  // namespace crowdsim
