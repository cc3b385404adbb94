#pragma once

#include <optional>
#include <vector>

#include "pbp/features.hpp"
#include "pbp/model.hpp"

namespace pbp {

// K trajectories with probabilities for one agent, in the scene frame.
struct PredictionSet {
  std::vector<std::vector<Vec2>> trajectories;              // K x T
  std::vector<double> probabilities;                        // sums to 1
  std::vector<std::optional<std::vector<int>>> mode_paths;  // segment ids; absent = path-free
};

struct PredictConfig {
  SamplerParams sampler;
  double nms_endpoint_radius_m = 2.0;
};

// Softmax distribution over the candidate paths from logits of
// head(concat(agent, path, agent-path)). Throws E_EMPTY_CANDIDATES when the
// set is empty; the caller falls back to the path-free decoder.
std::vector<double> classify_paths(const ModelParams& params,
                                   const std::vector<double>& agent_feature,
                                   const LaneGraph& graph, const AgentPose& pose,
                                   const CandidateSet& candidates);

struct NmsSelection {
  std::size_t index = 0;
  double probability = 0.0;  // renormalized over the selection
  bool backfilled = false;
};

// Greedy endpoint NMS: take the most probable unsuppressed candidate,
// suppress everything ending within endpoint_radius of it, repeat. Suppressed
// candidates backfill (flagged) when fewer than k survive.
std::vector<NmsSelection> select_paths_nms(const std::vector<Vec2>& endpoints,
                                           const std::vector<double>& probabilities,
                                           int k, double endpoint_radius);
std::vector<NmsSelection> select_paths_nms(const CandidateSet& candidates,
                                           const std::vector<double>& probabilities,
                                           int k, double endpoint_radius);

// Frenet regression conditioned on one reference path. Outputs T states with
// s accumulated from the agent's current arc length.
FrenetTrajectory decode_frenet(const ModelParams& params,
                               const std::vector<double>& agent_feature,
                               const ReferencePath& path,
                               const std::vector<double>& path_feature,
                               const FrenetTrajectory& history_frenet);

// Fallback decoder: K agent-frame trajectories and a K-way mode softmax.
PredictionSet decode_path_free(const ModelParams& params,
                               const std::vector<double>& agent_feature,
                               const AgentPose& pose);

// Path-free probability in (0, 1); > 0.5 routes the agent to the fallback.
double select_decoder(const ModelParams& params, const std::vector<double>& agent_feature);

// Full pipeline for one agent under the model's decoder kind.
PredictionSet predict(const ModelParams& params, const Scene& scene, int agent_id,
                      const PredictConfig& config);

// Prediction document: {"agent_id": ..., "modes": [{"probability", "waypoints",
// "path_segment_ids"}]}. Serialization round-trips exactly.
std::string prediction_to_json(const PredictionSet& preds, int agent_id);
std::pair<PredictionSet, int> prediction_from_json(const std::string& text);

}  // namespace pbp
