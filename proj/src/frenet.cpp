#include "pbp/frenet.hpp"

#include <algorithm>

#include "pbp/error.hpp"

namespace pbp {

namespace {

void check_path(const ReferencePath& path) {
  if (path.polyline.size() < 2 || path.cum_arclength.size() != path.polyline.size() ||
      !(path.length() > 0.0))
    throw Error(err::kGeometry, "degenerate reference path");
}

// Projection restricted to feet with s >= s_floor. Chords are scanned in s
// order and a candidate must be strictly closer to win, so equidistant feet
// resolve to the smallest s.
FrenetState project_with_floor(const ReferencePath& path, const Vec2& point,
                               double s_floor) {
  const auto& poly = path.polyline;
  const auto& cum = path.cum_arclength;

  double best_dist = std::numeric_limits<double>::infinity();
  FrenetState best;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double seg_len = cum[i + 1] - cum[i];
    if (cum[i + 1] < s_floor) continue;  // chord entirely below the floor

    double t = project_param_on_segment(poly[i], poly[i + 1], point);
    if (s_floor > cum[i]) {
      const double t_lo = (s_floor - cum[i]) / seg_len;
      t = std::max(t, t_lo);
    }
    const Vec2 foot = poly[i] + (poly[i + 1] - poly[i]) * t;
    const Vec2 offset = point - foot;
    const double dist = offset.norm();
    if (dist < best_dist) {
      best_dist = dist;
      const Vec2 dir = (poly[i + 1] - poly[i]) * (1.0 / seg_len);
      best.s = cum[i] + t * seg_len;
      best.d = dir.cross(offset) >= 0.0 ? dist : -dist;
    }
  }
  return best;
}

}  // namespace

FrenetState project_to_frenet(const ReferencePath& path, const Vec2& point) {
  check_path(path);
  return project_with_floor(path, point, 0.0);
}

Vec2 frenet_to_cartesian(const ReferencePath& path, const FrenetState& state) {
  check_path(path);
  const auto& poly = path.polyline;
  const auto& cum = path.cum_arclength;
  const double total = path.length();

  double s = std::max(state.s, 0.0);
  if (s > total) {
    s = std::min(s, total + kFrenetExtrapolationCap);
    const std::size_t last = poly.size() - 2;
    const Vec2 dir = (poly[last + 1] - poly[last]).normalized();
    return poly.back() + dir * (s - total) + dir.left_normal() * state.d;
  }

  // Lower chord at exact joins.
  auto it = std::lower_bound(cum.begin(), cum.end(), s);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
      0, std::distance(cum.begin(), it) - 1));
  if (i + 1 >= poly.size()) i = poly.size() - 2;

  const double seg_len = cum[i + 1] - cum[i];
  const double t = (s - cum[i]) / seg_len;
  const Vec2 base = poly[i] + (poly[i + 1] - poly[i]) * t;
  const Vec2 dir = (poly[i + 1] - poly[i]) * (1.0 / seg_len);
  return base + dir.left_normal() * state.d;
}

FrenetTrajectory trajectory_to_frenet(const ReferencePath& path,
                                      const std::vector<Vec2>& trajectory) {
  check_path(path);
  if (trajectory.empty())
    throw Error(err::kGeometry, "cannot project an empty trajectory");

  FrenetTrajectory out;
  out.path = &path;
  out.states.reserve(trajectory.size());
  double prev_s = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double floor = i == 0 ? 0.0 : std::max(0.0, prev_s - 1.0);
    const FrenetState st = project_with_floor(path, trajectory[i], floor);
    out.states.push_back(st);
    prev_s = st.s;
  }
  return out;
}

}  // namespace pbp
