#pragma once

#include <array>
#include <string>
#include <vector>

#include "pbp/features.hpp"
#include "pbp/model.hpp"
#include "pbp/predictor.hpp"

namespace pbp {

// Everything the loss needs for one focal agent, computed once per scene so
// epochs run pure head math. Geometry (candidates, Frenet projections, frame
// transforms) never changes across epochs.
struct TrainingSample {
  int agent_id = -1;
  bool has_future = false;
  bool is_path_free = false;

  std::vector<double> agent_feature;
  AgentPose pose;
  CandidateSet candidates;
  std::vector<std::array<double, kPathRawDim>> path_raw;
  std::vector<std::array<double, kAgentPathRawDim>> agent_path_raw;
  std::vector<std::array<double, kGoalRawDim>> goal_raw;

  // Teacher-forcing targets on the ground-truth path (on-path agents only).
  std::vector<double> hist_frenet_deltas;
  double s0 = 0.0;
  std::vector<FrenetState> gt_frenet;

  // Agent-frame targets (any agent with a future).
  std::vector<double> hist_cartesian_deltas;
  std::vector<Vec2> gt_agent_frame;

  bool on_path() const { return has_future && !is_path_free && candidates.gt_index.has_value(); }
};

TrainingSample preprocess_scene(const Scene& scene, const ModelConfig& config,
                                const SamplerParams& sampler);

// Scenario files in a directory (sorted *.json), loaded and preprocessed.
std::vector<std::string> list_scene_files(const std::string& dir);
std::vector<Scene> load_scenes(const std::string& dir);

}  // namespace pbp
