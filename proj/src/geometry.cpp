#include "pbp/geometry.hpp"

namespace pbp {

bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p,
                      double boundary_eps) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    if (point_segment_distance(a, b, p) <= boundary_eps) return true;
  }

  // Even-odd rule, horizontal ray towards +x.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    const bool crosses = (a.y > p.y) != (b.y > p.y);
    if (crosses) {
      const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

namespace {

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                                 const Vec2& d) {
  const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q - p).cross(r - p);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

bool polygon_is_simple(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    if ((b - a).norm() <= 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex; skip them (including the wrap pair).
      if (j == i || j == (i + 1) % n || (j + 1) % n == i) continue;
      const Vec2& c = polygon[j];
      const Vec2& d = polygon[(j + 1) % n];
      if (segments_properly_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

}  // namespace pbp
