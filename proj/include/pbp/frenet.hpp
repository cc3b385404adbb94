#pragma once

#include <vector>

#include "pbp/path_sampler.hpp"

namespace pbp {

// Path-relative coordinates: s = arc length along the polyline, d = signed
// lateral offset (positive left of the path direction).
struct FrenetState {
  double s = 0.0;
  double d = 0.0;
};

struct FrenetTrajectory {
  std::vector<FrenetState> states;
  const ReferencePath* path = nullptr;  // non-owning
};

// How far frenet_to_cartesian extrapolates past the sampled path end.
inline constexpr double kFrenetExtrapolationCap = 20.0;

// Closest-point projection onto the polyline. Equidistant feet resolve to
// the smallest s; points beyond the ends clamp s to [0, L] with d measured
// from the clamped foot.
FrenetState project_to_frenet(const ReferencePath& path, const Vec2& point);

// Inverse transform P = xi(s) + d * n(s) with linear interpolation inside a
// chord; n(s) is the left normal of the chord containing s (the lower chord
// at exact joins). s past the end extrapolates along the final chord, capped
// at kFrenetExtrapolationCap metres; s below 0 clamps.
Vec2 frenet_to_cartesian(const ReferencePath& path, const FrenetState& state);

// Per-point projection with a monotonic-s prior: each point only considers
// feet at s >= previous s - 1 m, so trajectories along self-near polylines
// cannot jump backwards.
FrenetTrajectory trajectory_to_frenet(const ReferencePath& path,
                                      const std::vector<Vec2>& trajectory);

}  // namespace pbp
