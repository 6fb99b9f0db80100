#pragma once

#include <cmath>
#include <numbers>

namespace ltp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  /// z-component of the 3-D cross product; positive when `o` is to the left.
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr Vec2 left_normal() const { return {-y, x}; }
};

constexpr Vec2 operator*(double k, Vec2 v) { return v * k; }

inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

inline Vec2 rotate(Vec2 v, double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps to (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

}  // namespace ltp
