#pragma once

#include <array>
#include <vector>

#include "pbp/frenet.hpp"
#include "pbp/lane_graph.hpp"
#include "pbp/path_sampler.hpp"

namespace pbp {

// Current kinematic state derived from an agent's history.
struct AgentPose {
  Vec2 position;
  double heading = 0.0;  // radians; 0 for agents that never moved > 1 cm
  double speed = 0.0;    // m/s from the last history displacement
};

// Metre-valued raw features feed 64-wide MLPs; a fixed decimetre scale keeps
// their magnitudes near the unit range the initialization assumes.
inline constexpr double kFeatureScale = 0.1;

inline constexpr int kPathRawDim = 12;       // start/mid/end chord: midpoint + direction
inline constexpr int kAgentPathRawDim = 9;   // start/mid/end chord: offset + angle delta
inline constexpr int kGoalRawDim = 6;        // endpoint, end direction, angle delta, range

AgentPose estimate_pose(const std::vector<Vec2>& history, double dt);

Vec2 to_agent_frame(const Vec2& point, const AgentPose& pose);
Vec2 from_agent_frame(const Vec2& point, const AgentPose& pose);
Vec2 direction_to_agent_frame(const Vec2& direction, const AgentPose& pose);

// Hand-crafted agent descriptor: heading-frame history displacements in
// metres (right-aligned, zero-padded on the older side), then current speed
// and heading sine/cosine. Translation invariant by construction.
std::vector<double> encode_agent(const std::vector<Vec2>& history, double dt, int agent_dim);

std::array<double, kPathRawDim> path_raw_feature(const LaneGraph& graph,
                                                 const ReferencePath& path,
                                                 const AgentPose& pose);
std::array<double, kAgentPathRawDim> agent_path_raw_feature(const LaneGraph& graph,
                                                            const ReferencePath& path,
                                                            const AgentPose& pose);
std::array<double, kGoalRawDim> goal_raw_feature(const LaneGraph& graph,
                                                 const ReferencePath& path,
                                                 const AgentPose& pose);

// Regressor conditioning: history as (s - s0, d) pairs on the path, or as
// agent-frame (x, y) pairs, right-aligned to `history_steps` entries.
std::vector<double> frenet_history_deltas(const FrenetTrajectory& history_frenet,
                                          int history_steps);
std::vector<double> cartesian_history_deltas(const std::vector<Vec2>& history,
                                             const AgentPose& pose, int history_steps);

}  // namespace pbp
