#pragma once

#include <cmath>

namespace ixsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double k, const Vec2& v) { return v * k; }

/// Unit vector for a heading angle (radians, x-east / y-north frame).
inline Vec2 heading_vec(double h) { return {std::cos(h), std::sin(h)}; }

/// Rotate a vector by angle a.
inline Vec2 rotate(const Vec2& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

/// Signed difference b - a taken along the shortest angular path.
inline double angle_diff(double b, double a) { return wrap_angle(b - a); }

/// Interpolate between headings along the shortest angular path.
inline double lerp_angle(double a, double b, double t) {
  return wrap_angle(a + t * angle_diff(b, a));
}

struct Aabb {
  Vec2 lo;
  Vec2 hi;
  bool contains(const Vec2& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
};

}  // namespace ixsim
