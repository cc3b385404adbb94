#include "pbp/features.hpp"

#include <algorithm>

#include "pbp/error.hpp"

namespace pbp {

namespace {

// Start / middle / end chords of a path, the descriptors the classifier sees.
std::array<const LaneSegment*, 3> key_segments(const LaneGraph& graph,
                                               const ReferencePath& path) {
  const auto& ids = path.segment_ids;
  const std::size_t mid = ids.size() / 2;
  return {&graph.segment(ids.front()), &graph.segment(ids[mid]), &graph.segment(ids.back())};
}

}  // namespace

AgentPose estimate_pose(const std::vector<Vec2>& history, double dt) {
  if (history.size() < 2)
    throw Error(err::kHistory, "agent history needs at least 2 points");
  AgentPose pose;
  pose.position = history.back();
  pose.speed = (history.back() - history[history.size() - 2]).norm() / dt;
  pose.heading = 0.0;  // stationary convention
  for (std::size_t i = history.size() - 1; i >= 1; --i) {
    const Vec2 d = history[i] - history[i - 1];
    if (d.norm() > 0.01) {
      pose.heading = d.angle();
      break;
    }
  }
  return pose;
}

Vec2 to_agent_frame(const Vec2& point, const AgentPose& pose) {
  return (point - pose.position).rotated(-pose.heading);
}

Vec2 from_agent_frame(const Vec2& point, const AgentPose& pose) {
  return pose.position + point.rotated(pose.heading);
}

Vec2 direction_to_agent_frame(const Vec2& direction, const AgentPose& pose) {
  return direction.rotated(-pose.heading);
}

std::vector<double> encode_agent(const std::vector<Vec2>& history, double dt,
                                 int agent_dim) {
  const AgentPose pose = estimate_pose(history, dt);
  std::vector<double> feature(agent_dim, 0.0);

  const int pair_capacity = (agent_dim - 3) / 2;
  const int n_disp = std::min<int>(static_cast<int>(history.size()) - 1, pair_capacity);
  // Right-aligned: the most recent displacement always lands on the same slots.
  int slot = pair_capacity - n_disp;
  for (int i = static_cast<int>(history.size()) - n_disp; i < static_cast<int>(history.size());
       ++i, ++slot) {
    const Vec2 d = (history[i] - history[i - 1]).rotated(-pose.heading);
    feature[2 * slot] = d.x;
    feature[2 * slot + 1] = d.y;
  }
  feature[agent_dim - 3] = pose.speed;
  feature[agent_dim - 2] = std::sin(pose.heading);
  feature[agent_dim - 1] = std::cos(pose.heading);
  return feature;
}

std::array<double, kPathRawDim> path_raw_feature(const LaneGraph& graph,
                                                 const ReferencePath& path,
                                                 const AgentPose& pose) {
  std::array<double, kPathRawDim> raw{};
  const auto segs = key_segments(graph, path);
  for (int k = 0; k < 3; ++k) {
    const Vec2 mid = to_agent_frame(segs[k]->midpoint(), pose);
    const Vec2 dir = direction_to_agent_frame(segs[k]->direction, pose);
    raw[4 * k + 0] = mid.x * kFeatureScale;
    raw[4 * k + 1] = mid.y * kFeatureScale;
    raw[4 * k + 2] = dir.x;
    raw[4 * k + 3] = dir.y;
  }
  return raw;
}

std::array<double, kAgentPathRawDim> agent_path_raw_feature(const LaneGraph& graph,
                                                            const ReferencePath& path,
                                                            const AgentPose& pose) {
  std::array<double, kAgentPathRawDim> raw{};
  const auto segs = key_segments(graph, path);
  for (int k = 0; k < 3; ++k) {
    const Vec2 offset = to_agent_frame(segs[k]->midpoint(), pose);
    raw[3 * k + 0] = offset.x * kFeatureScale;
    raw[3 * k + 1] = offset.y * kFeatureScale;
    raw[3 * k + 2] = wrap_angle(segs[k]->direction.angle() - pose.heading);
  }
  return raw;
}

std::array<double, kGoalRawDim> goal_raw_feature(const LaneGraph& graph,
                                                 const ReferencePath& path,
                                                 const AgentPose& pose) {
  std::array<double, kGoalRawDim> raw{};
  const LaneSegment& end_seg = graph.segment(path.segment_ids.back());
  const Vec2 goal = to_agent_frame(path.endpoint(), pose);
  const Vec2 dir = direction_to_agent_frame(end_seg.direction, pose);
  raw[0] = goal.x * kFeatureScale;
  raw[1] = goal.y * kFeatureScale;
  raw[2] = dir.x;
  raw[3] = dir.y;
  raw[4] = wrap_angle(end_seg.direction.angle() - pose.heading);
  raw[5] = goal.norm() * kFeatureScale;
  return raw;
}

std::vector<double> frenet_history_deltas(const FrenetTrajectory& history_frenet,
                                          int history_steps) {
  std::vector<double> out(2 * history_steps, 0.0);
  const auto& states = history_frenet.states;
  if (states.empty()) throw Error(err::kHistory, "empty Frenet history");
  const double s0 = states.back().s;
  const int n = std::min<int>(static_cast<int>(states.size()), history_steps);
  int slot = history_steps - n;
  for (int i = static_cast<int>(states.size()) - n; i < static_cast<int>(states.size());
       ++i, ++slot) {
    out[2 * slot] = (states[i].s - s0) * kFeatureScale;
    out[2 * slot + 1] = states[i].d * kFeatureScale;
  }
  return out;
}

std::vector<double> cartesian_history_deltas(const std::vector<Vec2>& history,
                                             const AgentPose& pose, int history_steps) {
  std::vector<double> out(2 * history_steps, 0.0);
  const int n = std::min<int>(static_cast<int>(history.size()), history_steps);
  int slot = history_steps - n;
  for (int i = static_cast<int>(history.size()) - n; i < static_cast<int>(history.size());
       ++i, ++slot) {
    const Vec2 p = to_agent_frame(history[i], pose);
    out[2 * slot] = p.x * kFeatureScale;
    out[2 * slot + 1] = p.y * kFeatureScale;
  }
  return out;
}

}  // namespace pbp
