#pragma once

#include <cmath>

#include "crowdsim/error.hpp"

namespace crowdsim {

/// Plain 2-D vector. Used for positions (m) and velocities (m/s) alike.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3-D cross product.
constexpr double det(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

constexpr double abs_sq(const Vec2& v) { return dot(v, v); }

inline double abs(const Vec2& v) { return std::sqrt(abs_sq(v)); }

/// Counter-clockwise perpendicular.
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

inline constexpr double kMinNormalizable = 1e-12;

/// Throws kDegenerateVector for ||v|| < 1e-12.
inline Vec2 normalize(const Vec2& v) {
  const double length = abs(v);
  if (!(length >= kMinNormalizable)) {
    throw Error(ErrorCode::kDegenerateVector, "cannot normalize near-zero vector");
  }
  return v / length;
}

/// Shortens v to at most max_length, keeping its direction.
inline Vec2 clip_length(const Vec2& v, double max_length) {
  const double length_sq = abs_sq(v);
  if (length_sq > max_length * max_length) {
    return v * (max_length / std::sqrt(length_sq));
  }
  return v;
}

/// A closed half-plane of velocities: v is permitted iff (v - point) . normal >= 0.
struct HalfPlane {
  Vec2 point;
  Vec2 normal;  // unit length

  /// Boundary direction with the permitted side on its left.
  constexpr Vec2 direction() const { return {normal.y, -normal.x}; }

  constexpr bool operator==(const HalfPlane&) const = default;
};

constexpr double signed_distance(const HalfPlane& hp, const Vec2& v) {
  return dot(v - hp.point, hp.normal);
}

constexpr bool permits(const HalfPlane& hp, const Vec2& v) { return signed_distance(hp, v) >= 0.0; }

/// Axis-aligned rectangle [min, max].
struct Rect {
  Vec2 min;
  Vec2 max;

  constexpr double width() const { return max.x - min.x; }
  constexpr double height() const { return max.y - min.y; }
  constexpr double area() const { return width() * height(); }
  constexpr Vec2 center() const { return {0.5 * (min.x + max.x), 0.5 * (min.y + max.y)}; }
  constexpr bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  constexpr bool contains(const Rect& r) const { return contains(r.min) && contains(r.max); }

  constexpr bool operator==(const Rect&) const = default;
};

inline Vec2 rotate(const Vec2& v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace crowdsim
