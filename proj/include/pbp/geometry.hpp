#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace pbp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // z-component of the 3-D cross product; positive when o is left of *this.
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  double angle() const { return std::atan2(y, x); }

  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  // Unit-left rotation: the left normal of a direction vector.
  Vec2 left_normal() const { return {-y, x}; }
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

// Foot of the perpendicular from p onto segment ab, clamped to the segment.
// Returns the clamp parameter t in [0, 1]; foot = a + t * (b - a).
inline double project_param_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 <= 0.0) return 0.0;
  const double t = (p - a).dot(ab) / len2;
  return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}

inline double point_segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const double t = project_param_on_segment(a, b, p);
  return (p - (a + (b - a) * t)).norm();
}

// Distance from p to a piecewise-linear polyline (>= 2 points).
inline double point_polyline_distance(const std::vector<Vec2>& poly, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double d = point_segment_distance(poly[i], poly[i + 1], p);
    if (d < best) best = d;
  }
  return best;
}

// Even-odd ray casting with an explicit boundary test: points on the polygon
// boundary count as inside.
bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p,
                      double boundary_eps = 1e-9);

// True iff the closed polygon has no two non-adjacent edges intersecting.
bool polygon_is_simple(const std::vector<Vec2>& polygon);

}  // namespace pbp
