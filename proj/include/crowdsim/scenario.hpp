#pragma once

// Declarative scenarios and the built-in crossing generators. The text format
// is JSON; docs/scenario_format.md describes every field.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "crowdsim/engine.hpp"
#include "crowdsim/error.hpp"
#include "crowdsim/geometry.hpp"
#include "crowdsim/random.hpp"

namespace crowdsim {

inline constexpr const char* kScenarioFormatName = "crowdsim-scenario";
inline constexpr int kScenarioFormatVersion = 1;

/// Spawned centers keep at least this multiple of the combined radius apart.
inline constexpr double kSpawnClearanceFactor = 1.5;
/// Free-space fraction the built-in generators size their spawn regions for.
inline constexpr double kDefaultFreeSpaceFraction = 0.85;

struct Choice {
  double value = 0.0;
  double probability = 0.0;
  bool operator==(const Choice&) const = default;
};

struct SpawnGroup {
  std::size_t count = 1;
  Rect spawn_region;
  Rect goal_region;
  // Each agent's goal is goal_region.center() + R(goal_rotation_deg) *
  // (spawn position - spawn_region.center()).
  double goal_rotation_deg = 0.0;
  std::vector<Choice> radius_choices;
  std::vector<Choice> speed_choices;
  double max_speed_factor = 1.0;
  bool operator==(const SpawnGroup&) const = default;
};

/// Any subset of SimParams a scenario may pin.
struct ParamsOverride {
  std::optional<double> dt;
  std::optional<double> time_horizon;
  std::optional<double> r_obs;
  std::optional<std::size_t> neighbor_cap;
  std::optional<double> responsibility;
  std::optional<double> goal_tolerance;
  std::optional<std::uint64_t> rng_seed;
  std::optional<std::size_t> worker_count;
  std::optional<std::size_t> work_unit_size;
  std::optional<std::size_t> step_cap;
  bool operator==(const ParamsOverride&) const = default;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  Rect world_bounds;
  std::vector<SpawnGroup> groups;
  ParamsOverride params_override;
  bool operator==(const Scenario&) const = default;

  std::size_t agent_count() const {
    std::size_t n = 0;
    for (const SpawnGroup& g : groups) {
      n += g.count;
    }
    return n;
  }
};

inline SimParams apply_overrides(SimParams p, const ParamsOverride& o) {
  if (o.dt) p.dt = *o.dt;
  if (o.time_horizon) p.time_horizon = *o.time_horizon;
  if (o.r_obs) p.r_obs = *o.r_obs;
  if (o.neighbor_cap) p.neighbor_cap = *o.neighbor_cap;
  if (o.responsibility) p.responsibility = *o.responsibility;
  if (o.goal_tolerance) p.goal_tolerance = *o.goal_tolerance;
  if (o.rng_seed) p.rng_seed = *o.rng_seed;
  if (o.worker_count) p.worker_count = *o.worker_count;
  if (o.work_unit_size) p.work_unit_size = *o.work_unit_size;
  if (o.step_cap) p.step_cap = *o.step_cap;
  return p;
}

namespace detail {

inline void check(bool ok, const std::string& what) {
  if (!ok) {
    throw Error(ErrorCode::kValidationError, what);
  }
}

inline void validate_choices(const std::vector<Choice>& choices, const std::string& where) {
  check(!choices.empty(), where + ": at least one choice is required");
  double sum = 0.0;
  for (const Choice& c : choices) {
    check(c.value > 0.0 && std::isfinite(c.value), where + ": values must be positive");
    check(c.probability >= 0.0, where + ": probabilities must be non-negative");
    sum += c.probability;
  }
  check(std::fabs(sum - 1.0) <= 1e-9, where + ": probabilities sum to " + std::to_string(sum) +
                                          ", expected 1");
}

inline double draw(const std::vector<Choice>& choices, CounterRng& rng) {
  const double u = rng.next_unit();
  double acc = 0.0;
  for (const Choice& c : choices) {
    acc += c.probability;
    if (u < acc) {
      return c.value;
    }
  }
  return choices.back().value;
}

inline double max_value(const std::vector<Choice>& choices) {
  double m = 0.0;
  for (const Choice& c : choices) {
    if (c.probability > 0.0) {
      m = std::max(m, c.value);
    }
  }
  return m;
}

inline double mean_square(const std::vector<Choice>& choices) {
  double s = 0.0;
  for (const Choice& c : choices) {
    s += c.probability * c.value * c.value;
  }
  return s;
}

inline bool proper(const Rect& r) {
  return std::isfinite(r.min.x) && std::isfinite(r.min.y) && std::isfinite(r.max.x) &&
         std::isfinite(r.max.y) && r.width() > 0.0 && r.height() > 0.0;
}

}  // namespace detail

/// Checks every scenario invariant; throws kValidationError naming the first
/// violation.
inline void validate(const Scenario& s) {
  using detail::check;
  check(detail::proper(s.world_bounds), "world_bounds must have positive area");
  check(!s.groups.empty(), "groups: at least one group is required");
  for (std::size_t i = 0; i < s.groups.size(); ++i) {
    const SpawnGroup& g = s.groups[i];
    const std::string where = "groups[" + std::to_string(i) + "]";
    check(g.count >= 1, where + ".count must be positive");
    check(detail::proper(g.spawn_region), where + ".spawn_region must have positive area");
    check(detail::proper(g.goal_region), where + ".goal_region must have positive area");
    check(s.world_bounds.contains(g.spawn_region), where + ".spawn_region lies outside world_bounds");
    check(s.world_bounds.contains(g.goal_region), where + ".goal_region lies outside world_bounds");
    check(std::isfinite(g.goal_rotation_deg), where + ".goal_rotation_deg must be finite");
    detail::validate_choices(g.radius_choices, where + ".radius_choices");
    detail::validate_choices(g.speed_choices, where + ".speed_choices");
    check(g.max_speed_factor >= 1.0 && std::isfinite(g.max_speed_factor),
          where + ".max_speed_factor must be at least 1");
  }
  validate(apply_overrides(SimParams{}, s.params_override));
}

/// Places every agent. Positions are drawn uniformly inside the spawn region
/// (inset by the agent's radius) and rejected while closer than
/// kSpawnClearanceFactor x combined radius to an agent already placed.
/// Throws kRegionTooSmall when a region cannot hold its group.
inline std::vector<AgentState> instantiate(const Scenario& s) {
  validate(s);

  double max_r = 0.0;
  for (const SpawnGroup& g : s.groups) {
    max_r = std::max(max_r, detail::max_value(g.radius_choices));
  }
  const double cell = 2.0 * kSpawnClearanceFactor * max_r;

  std::vector<AgentState> agents;
  agents.reserve(s.agent_count());
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> occupied;
  const auto key = [&](long long cx, long long cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint64_t>(cy & 0xffffffff);
  };
  const auto cell_of = [&](const Vec2& p) {
    return std::pair<long long, long long>{static_cast<long long>(std::floor(p.x / cell)),
                                           static_cast<long long>(std::floor(p.y / cell))};
  };

  for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
    const SpawnGroup& g = s.groups[gi];
    CounterRng rng(hash_combine(s.seed, gi));
    const double rotation = g.goal_rotation_deg * std::numbers::pi / 180.0;
    const std::string where = "groups[" + std::to_string(gi) + "]";

    // Pigeonhole bound: even a perfect hexagonal packing of the exclusion
    // discs cannot exceed ~0.907 coverage.
    const double r_g = detail::max_value(g.radius_choices);
    const double exclusion = kSpawnClearanceFactor * r_g;
    if (static_cast<double>(g.count) * std::numbers::pi * exclusion * exclusion >
        0.9069 * (g.spawn_region.width() + 2.0 * exclusion) *
            (g.spawn_region.height() + 2.0 * exclusion)) {
      throw Error(ErrorCode::kRegionTooSmall,
                  where + ".spawn_region cannot hold " + std::to_string(g.count) + " agents");
    }

    for (std::size_t k = 0; k < g.count; ++k) {
      AgentState a;
      a.agent_id = agents.size();
      a.radius = detail::draw(g.radius_choices, rng);
      a.desired_speed = detail::draw(g.speed_choices, rng);
      a.max_speed = a.desired_speed * g.max_speed_factor;

      const Rect inner{g.spawn_region.min + Vec2(a.radius, a.radius),
                       g.spawn_region.max - Vec2(a.radius, a.radius)};
      if (!(inner.width() >= 0.0) || !(inner.height() >= 0.0)) {
        throw Error(ErrorCode::kRegionTooSmall, where + ".spawn_region narrower than an agent");
      }

      constexpr int kMaxAttempts = 20000;
      bool placed = false;
      for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
        const Vec2 p{rng.uniform(inner.min.x, inner.max.x), rng.uniform(inner.min.y, inner.max.y)};
        const auto [cx, cy] = cell_of(p);
        bool clear = true;
        for (long long dx = -1; dx <= 1 && clear; ++dx) {
          for (long long dy = -1; dy <= 1 && clear; ++dy) {
            const auto it = occupied.find(key(cx + dx, cy + dy));
            if (it == occupied.end()) {
              continue;
            }
            for (std::size_t other : it->second) {
              const double need = kSpawnClearanceFactor * (a.radius + agents[other].radius);
              if (abs_sq(agents[other].position - p) < need * need) {
                clear = false;
                break;
              }
            }
          }
        }
        if (clear) {
          a.position = p;
          placed = true;
        }
      }
      if (!placed) {
        throw Error(ErrorCode::kRegionTooSmall,
                    where + ".spawn_region cannot hold " + std::to_string(g.count) + " agents");
      }
      a.goal = g.goal_region.center() + rotate(a.position - g.spawn_region.center(), rotation);
      const auto [cx, cy] = cell_of(a.position);
      occupied[key(cx, cy)].push_back(agents.size());
      agents.push_back(a);
    }
  }
  return agents;
}

/// Layout knobs for the two-way crossing. Unset region sizes are derived from
/// the free-space fraction.
struct TwoWayLayout {
  double free_space_fraction = kDefaultFreeSpaceFraction;
  double aspect = 2.0;       // region height / width
  double gap_factor = 1.0;   // gap between the regions, in region widths
  double margin = 5.0;       // m of world around the regions
  std::optional<double> region_width;
  std::optional<double> region_height;
};

inline std::vector<Choice> homogeneous_radius() { return {{0.5, 1.0}}; }
inline std::vector<Choice> homogeneous_speed() { return {{1.0, 1.0}}; }
inline constexpr double kHomogeneousMaxSpeedFactor = 1.33;
inline std::vector<Choice> heterogeneous_radius() {
  return {{0.5, 1.0 / 3.0}, {0.75, 1.0 / 3.0}, {1.0, 1.0 / 3.0}};
}
inline std::vector<Choice> heterogeneous_speed() {
  return {{1.0, 1.0 / 3.0}, {1.33, 1.0 / 3.0}, {2.0, 1.0 / 3.0}};
}
inline constexpr double kHeterogeneousMaxSpeedFactor = 1.25;

/// Area a group of `count` agents needs for the given free-space fraction.
inline double region_area_for(std::size_t count, const std::vector<Choice>& radii,
                              double free_space_fraction) {
  return static_cast<double>(count) * std::numbers::pi * detail::mean_square(radii) /
         (1.0 - free_space_fraction);
}

/// Two groups walking past each other along x. Group 0 spawns on the left and
/// walks right; group 1 spawns in group 0's goal region and walks left.
inline Scenario generate_two_way(std::size_t count_per_side, bool heterogeneous,
                                 std::uint64_t seed, const TwoWayLayout& layout = {}) {
  if (count_per_side < 1) {
    throw Error(ErrorCode::kValidationError, "count_per_side must be positive");
  }
  Scenario s;
  s.name = heterogeneous ? "two-way-heterogeneous" : "two-way";
  s.seed = seed;

  const std::vector<Choice> radii = heterogeneous ? heterogeneous_radius() : homogeneous_radius();
  const std::vector<Choice> speeds = heterogeneous ? heterogeneous_speed() : homogeneous_speed();
  const double factor = heterogeneous ? kHeterogeneousMaxSpeedFactor : kHomogeneousMaxSpeedFactor;

  const double area = region_area_for(count_per_side, radii, layout.free_space_fraction);
  const double width = layout.region_width.value_or(std::sqrt(area / layout.aspect));
  const double height = layout.region_height.value_or(area / width);
  const double gap = layout.gap_factor * width;

  const Rect left{{0.0, 0.0}, {width, height}};
  const Rect right{{width + gap, 0.0}, {2.0 * width + gap, height}};
  s.world_bounds = {{-layout.margin, -layout.margin},
                    {2.0 * width + gap + layout.margin, height + layout.margin}};

  SpawnGroup g{count_per_side, left, right, 0.0, radii, speeds, factor};
  s.groups.push_back(g);
  g.spawn_region = right;
  g.goal_region = left;
  s.groups.push_back(g);

  instantiate(s);  // surfaces kRegionTooSmall early
  return s;
}

struct EightWayLayout {
  double free_space_fraction = kDefaultFreeSpaceFraction;
  double margin = 5.0;
  std::optional<double> region_side;
};

/// Eight square regions on a ring around the origin, group k at bearing
/// 45 deg * k. Each group walks to the region 135 deg further round.
inline Scenario generate_eight_way(std::size_t count_per_group, std::uint64_t seed,
                                   const EightWayLayout& layout = {}) {
  if (count_per_group < 1) {
    throw Error(ErrorCode::kValidationError, "count_per_group must be positive");
  }
  Scenario s;
  s.name = "eight-way";
  s.seed = seed;

  const std::vector<Choice> radii = homogeneous_radius();
  const double side = layout.region_side.value_or(
      std::sqrt(region_area_for(count_per_group, radii, layout.free_space_fraction)));
  // Adjacent squares must not overlap even when their diagonals face each other.
  const double ring = (side * std::numbers::sqrt2 + 2.0) / (2.0 * std::sin(std::numbers::pi / 8.0));
  const double extent = ring + side * std::numbers::sqrt2 / 2.0 + layout.margin;
  s.world_bounds = {{-extent, -extent}, {extent, extent}};

  std::vector<Rect> regions;
  for (int k = 0; k < 8; ++k) {
    const double bearing = k * std::numbers::pi / 4.0;
    const Vec2 c{ring * std::cos(bearing), ring * std::sin(bearing)};
    regions.push_back({c - Vec2(side / 2.0, side / 2.0), c + Vec2(side / 2.0, side / 2.0)});
  }
  for (int k = 0; k < 8; ++k) {
    s.groups.push_back(SpawnGroup{count_per_group, regions[k], regions[(k + 3) % 8], 135.0, radii,
                                  homogeneous_speed(), kHomogeneousMaxSpeedFactor});
  }
  instantiate(s);
  return s;
}

// --- text format ----------------------------------------------------------

namespace detail {

using nlohmann::json;

inline void expect_known(const json& obj, std::initializer_list<const char*> known,
                         const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    bool found = false;
    for (const char* name : known) {
      if (k == name) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kParseError, "unknown field '" + path + (path.empty() ? "" : ".") + k + "'");
    }
  }
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kParseError,
                "missing field '" + path + (path.empty() ? "" : ".") + key + "'");
  }
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw Error(ErrorCode::kParseError, "field '" + path + "' must be a number");
  }
  return j.get<double>();
}

inline std::uint64_t as_unsigned(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::kParseError, "field '" + path + "' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline Vec2 as_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::kParseError, "field '" + path + "' must be an [x, y] array");
  }
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

inline Rect as_rect(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "field '" + path + "' must be an object");
  }
  expect_known(j, {"min", "max"}, path);
  return {as_vec2(require(j, "min", path), join(path, "min")),
          as_vec2(require(j, "max", path), join(path, "max"))};
}

inline std::vector<Choice> as_choices(const json& j, const std::string& path) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, "field '" + path + "' must be an array");
  }
  std::vector<Choice> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_object()) {
      throw Error(ErrorCode::kParseError, "field '" + p + "' must be an object");
    }
    expect_known(j[i], {"value", "probability"}, p);
    out.push_back({as_number(require(j[i], "value", p), join(p, "value")),
                   as_number(require(j[i], "probability", p), join(p, "probability"))});
  }
  return out;
}

inline json rect_json(const Rect& r) {
  return {{"min", {r.min.x, r.min.y}}, {"max", {r.max.x, r.max.y}}};
}

inline json choices_json(const std::vector<Choice>& cs) {
  json a = json::array();
  for (const Choice& c : cs) {
    a.push_back({{"value", c.value}, {"probability", c.probability}});
  }
  return a;
}

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline std::string save_scenario(const Scenario& s) {
  using detail::json;
  json groups = json::array();
  for (const SpawnGroup& g : s.groups) {
    groups.push_back({{"count", g.count},
                      {"spawn_region", detail::rect_json(g.spawn_region)},
                      {"goal_region", detail::rect_json(g.goal_region)},
                      {"goal_rotation_deg", g.goal_rotation_deg},
                      {"radius_choices", detail::choices_json(g.radius_choices)},
                      {"speed_choices", detail::choices_json(g.speed_choices)},
                      {"max_speed_factor", g.max_speed_factor}});
  }
  json params = json::object();
  const ParamsOverride& o = s.params_override;
  if (o.dt) params["dt"] = *o.dt;
  if (o.time_horizon) params["time_horizon"] = *o.time_horizon;
  if (o.r_obs) params["r_obs"] = *o.r_obs;
  if (o.neighbor_cap) params["neighbor_cap"] = *o.neighbor_cap;
  if (o.responsibility) params["responsibility"] = *o.responsibility;
  if (o.goal_tolerance) params["goal_tolerance"] = *o.goal_tolerance;
  if (o.rng_seed) params["rng_seed"] = *o.rng_seed;
  if (o.worker_count) params["worker_count"] = *o.worker_count;
  if (o.work_unit_size) params["work_unit_size"] = *o.work_unit_size;
  if (o.step_cap) params["step_cap"] = *o.step_cap;

  json doc = {{"format", kScenarioFormatName},
              {"version", kScenarioFormatVersion},
              {"name", s.name},
              {"seed", s.seed},
              {"world_bounds", detail::rect_json(s.world_bounds)},
              {"groups", groups},
              {"params", params}};
  return doc.dump(2) + "\n";
}

/// Parses and validates a scenario document. Syntax errors report line and
/// column; schema errors name the offending field.
inline Scenario load_scenario(const std::string& text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "scenario document must be an object");
  }
  detail::expect_known(doc, {"format", "version", "name", "seed", "world_bounds", "groups", "params"},
                       "");
  const json& format = detail::require(doc, "format", "");
  if (!format.is_string() || format.get<std::string>() != kScenarioFormatName) {
    throw Error(ErrorCode::kParseError, std::string("field 'format' must be \"") +
                                            kScenarioFormatName + "\"");
  }
  const std::uint64_t version = detail::as_unsigned(detail::require(doc, "version", ""), "version");
  if (version != kScenarioFormatVersion) {
    throw Error(ErrorCode::kParseError, "unsupported scenario version " + std::to_string(version));
  }

  Scenario s;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) {
      throw Error(ErrorCode::kParseError, "field 'name' must be a string");
    }
    s.name = it->get<std::string>();
  }
  if (const auto it = doc.find("seed"); it != doc.end()) {
    s.seed = detail::as_unsigned(*it, "seed");
  }
  s.world_bounds = detail::as_rect(detail::require(doc, "world_bounds", ""), "world_bounds");

  const json& groups = detail::require(doc, "groups", "");
  if (!groups.is_array()) {
    throw Error(ErrorCode::kParseError, "field 'groups' must be an array");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string p = "groups[" + std::to_string(i) + "]";
    const json& g = groups[i];
    if (!g.is_object()) {
      throw Error(ErrorCode::kParseError, "field '" + p + "' must be an object");
    }
    detail::expect_known(g, {"count", "spawn_region", "goal_region", "goal_rotation_deg",
                             "radius_choices", "speed_choices", "max_speed_factor"},
                         p);
    SpawnGroup group;
    group.count = detail::as_unsigned(detail::require(g, "count", p), p + ".count");
    group.spawn_region = detail::as_rect(detail::require(g, "spawn_region", p), p + ".spawn_region");
    group.goal_region = detail::as_rect(detail::require(g, "goal_region", p), p + ".goal_region");
    if (const auto it = g.find("goal_rotation_deg"); it != g.end()) {
      group.goal_rotation_deg = detail::as_number(*it, p + ".goal_rotation_deg");
    }
    group.radius_choices =
        detail::as_choices(detail::require(g, "radius_choices", p), p + ".radius_choices");
    group.speed_choices =
        detail::as_choices(detail::require(g, "speed_choices", p), p + ".speed_choices");
    group.max_speed_factor =
        detail::as_number(detail::require(g, "max_speed_factor", p), p + ".max_speed_factor");
    s.groups.push_back(group);
  }

  if (const auto it = doc.find("params"); it != doc.end()) {
    const json& pj = *it;
    if (!pj.is_object()) {
      throw Error(ErrorCode::kParseError, "field 'params' must be an object");
    }
    detail::expect_known(pj, {"dt", "time_horizon", "r_obs", "neighbor_cap", "responsibility",
                              "goal_tolerance", "rng_seed", "worker_count", "work_unit_size",
                              "step_cap"},
                         "params");
    ParamsOverride& o = s.params_override;
    const auto number = [&](const char* k, std::optional<double>& out) {
      if (const auto f = pj.find(k); f != pj.end()) out = detail::as_number(*f, std::string("params.") + k);
    };
    const auto count = [&](const char* k, std::optional<std::size_t>& out) {
      if (const auto f = pj.find(k); f != pj.end()) out = detail::as_unsigned(*f, std::string("params.") + k);
    };
    number("dt", o.dt);
    number("time_horizon", o.time_horizon);
    number("r_obs", o.r_obs);
    count("neighbor_cap", o.neighbor_cap);
    number("responsibility", o.responsibility);
    number("goal_tolerance", o.goal_tolerance);
    if (const auto f = pj.find("rng_seed"); f != pj.end()) {
      o.rng_seed = detail::as_unsigned(*f, "params.rng_seed");
    }
    count("worker_count", o.worker_count);
    count("work_unit_size", o.work_unit_size);
    count("step_cap", o.step_cap);
  }

  validate(s);
  return s;
}

}  // namespace crowdsim
