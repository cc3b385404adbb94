#include "pbp/predictor.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "pbp/error.hpp"

namespace pbp {

namespace {

std::vector<double> concat(std::span<const double> a, std::span<const double> b,
                           std::span<const double> c) {
  std::vector<double> out;
  out.reserve(a.size() + b.size() + c.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

// Regressor output convention shared with the trainer: the first T values are
// longitudinal increments accumulated from the agent's current coordinate,
// the last T are absolute lateral values.
std::vector<FrenetState> outputs_to_frenet(std::span<const double> y, double s0, int horizon) {
  std::vector<FrenetState> states(horizon);
  double s = s0;
  for (int t = 0; t < horizon; ++t) {
    s += y[t];
    states[t] = {s, y[horizon + t]};
  }
  return states;
}

std::vector<Vec2> outputs_to_agent_frame(std::span<const double> y, int horizon) {
  std::vector<Vec2> points(horizon);
  double x = 0.0;
  for (int t = 0; t < horizon; ++t) {
    x += y[t];
    points[t] = {x, y[horizon + t]};
  }
  return points;
}

std::vector<double> classify_goals(const ModelParams& params,
                                   const std::vector<double>& agent_feature,
                                   const LaneGraph& graph, const AgentPose& pose,
                                   const CandidateSet& candidates) {
  std::vector<double> logits;
  logits.reserve(candidates.paths.size());
  for (const ReferencePath& path : candidates.paths) {
    const auto raw = goal_raw_feature(graph, path, pose);
    const auto z = params.goal_encoder.forward(std::span(raw.data(), raw.size()));
    const auto logit = params.goal_classifier.forward(concat(agent_feature, z, {}));
    logits.push_back(logit[0]);
  }
  return softmax(logits);
}

}  // namespace

std::vector<double> classify_paths(const ModelParams& params,
                                   const std::vector<double>& agent_feature,
                                   const LaneGraph& graph, const AgentPose& pose,
                                   const CandidateSet& candidates) {
  if (candidates.paths.empty())
    throw Error(err::kEmptyCandidates, "cannot classify an empty candidate set");
  std::vector<double> logits;
  logits.reserve(candidates.paths.size());
  for (const ReferencePath& path : candidates.paths) {
    const auto raw_p = path_raw_feature(graph, path, pose);
    const auto raw_ap = agent_path_raw_feature(graph, path, pose);
    const auto z_p = params.path_encoder.forward(std::span(raw_p.data(), raw_p.size()));
    const auto z_ap =
        params.agent_path_encoder.forward(std::span(raw_ap.data(), raw_ap.size()));
    const auto logit = params.path_classifier.forward(concat(agent_feature, z_p, z_ap));
    logits.push_back(logit[0]);
  }
  return softmax(logits);
}

std::vector<NmsSelection> select_paths_nms(const std::vector<Vec2>& endpoints,
                                           const std::vector<double>& probabilities,
                                           int k, double endpoint_radius) {
  if (endpoints.size() != probabilities.size())
    throw Error(err::kShape, "NMS endpoints and probabilities disagree in size");
  if (k < 1) throw Error(err::kConfig, "NMS needs k >= 1");

  std::vector<std::size_t> order(endpoints.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probabilities[a] != probabilities[b] ? probabilities[a] > probabilities[b] : a < b;
  });

  std::vector<NmsSelection> selected;
  std::vector<bool> taken(endpoints.size(), false);
  std::vector<bool> suppressed(endpoints.size(), false);
  for (std::size_t idx : order) {
    if (static_cast<int>(selected.size()) >= k) break;
    if (suppressed[idx]) continue;
    selected.push_back({idx, probabilities[idx], false});
    taken[idx] = true;
    for (std::size_t j = 0; j < endpoints.size(); ++j)
      if ((endpoints[j] - endpoints[idx]).norm() <= endpoint_radius) suppressed[j] = true;
  }
  for (std::size_t idx : order) {
    if (static_cast<int>(selected.size()) >= k) break;
    if (taken[idx]) continue;
    selected.push_back({idx, probabilities[idx], true});
    taken[idx] = true;
  }

  double total = 0.0;
  for (const NmsSelection& s : selected) total += s.probability;
  if (total > 0.0)
    for (NmsSelection& s : selected) s.probability /= total;
  return selected;
}

std::vector<NmsSelection> select_paths_nms(const CandidateSet& candidates,
                                           const std::vector<double>& probabilities,
                                           int k, double endpoint_radius) {
  std::vector<Vec2> endpoints;
  endpoints.reserve(candidates.paths.size());
  for (const ReferencePath& path : candidates.paths) endpoints.push_back(path.endpoint());
  return select_paths_nms(endpoints, probabilities, k, endpoint_radius);
}

FrenetTrajectory decode_frenet(const ModelParams& params,
                               const std::vector<double>& agent_feature,
                               const ReferencePath& path,
                               const std::vector<double>& path_feature,
                               const FrenetTrajectory& history_frenet) {
  if (static_cast<int>(history_frenet.states.size()) < 1)
    throw Error(err::kHistory, "decode_frenet needs a projected history");
  const int horizon = params.config.horizon_steps;
  const auto deltas = frenet_history_deltas(history_frenet, params.config.history_steps);
  const auto y = params.frenet_regressor.forward(concat(agent_feature, path_feature, deltas));
  FrenetTrajectory out;
  out.path = &path;
  out.states = outputs_to_frenet(y, history_frenet.states.back().s, horizon);
  return out;
}

PredictionSet decode_path_free(const ModelParams& params,
                               const std::vector<double>& agent_feature,
                               const AgentPose& pose) {
  const int horizon = params.config.horizon_steps;
  const int k = params.config.num_modes;
  const auto y = params.path_free_regressor.forward(agent_feature);

  PredictionSet out;
  out.trajectories.resize(k);
  out.mode_paths.assign(k, std::nullopt);
  for (int m = 0; m < k; ++m) {
    out.trajectories[m].reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
      const Vec2 local{y[m * 2 * horizon + 2 * t], y[m * 2 * horizon + 2 * t + 1]};
      out.trajectories[m].push_back(from_agent_frame(local, pose));
    }
  }
  out.probabilities =
      softmax(std::span(y.data() + static_cast<std::size_t>(k) * 2 * horizon, k));
  return out;
}

double select_decoder(const ModelParams& params, const std::vector<double>& agent_feature) {
  return sigmoid(params.selector.forward(agent_feature)[0]);
}

PredictionSet predict(const ModelParams& params, const Scene& scene, int agent_id,
                      const PredictConfig& config) {
  const AgentTrack& track = scene.agent(agent_id);
  const AgentPose pose = estimate_pose(track.history, scene.dt);
  const auto f_a = encode_agent(track.history, scene.dt, params.config.agent_dim);
  const int horizon = params.config.horizon_steps;
  const int k = params.config.num_modes;

  if (params.decoder == DecoderKind::kMultimodalRegression)
    return decode_path_free(params, f_a, pose);

  CandidateSet candidates;
  candidates.agent_id = agent_id;
  const auto seeds = select_seed_segments(
      scene.map, pose.position, pose.heading, config.sampler.seed_radius_m,
      config.sampler.seed_max_angle_deg * M_PI / 180.0);
  const double max_len =
      config.sampler.max_length_for_speed(pose.speed, horizon * scene.dt);
  candidates.paths = sample_candidate_paths(scene.map, seeds, config.sampler.path_min_len_m,
                                            max_len, config.sampler.max_paths);

  if (candidates.paths.empty() || select_decoder(params, f_a) > 0.5)
    return decode_path_free(params, f_a, pose);

  const std::vector<double> probs =
      params.decoder == DecoderKind::kGoalBased
          ? classify_goals(params, f_a, scene.map, pose, candidates)
          : classify_paths(params, f_a, scene.map, pose, candidates);
  const auto selections =
      select_paths_nms(candidates, probs, k, config.nms_endpoint_radius_m);

  PredictionSet out;
  for (const NmsSelection& sel : selections) {
    const ReferencePath& path = candidates.paths[sel.index];
    std::vector<Vec2> waypoints;
    waypoints.reserve(horizon);
    if (params.decoder == DecoderKind::kPbp) {
      const auto raw_p = path_raw_feature(scene.map, path, pose);
      const auto z_p = params.path_encoder.forward(std::span(raw_p.data(), raw_p.size()));
      const FrenetTrajectory hist = trajectory_to_frenet(path, track.history);
      const FrenetTrajectory traj = decode_frenet(params, f_a, path, z_p, hist);
      for (const FrenetState& st : traj.states)
        waypoints.push_back(frenet_to_cartesian(path, st));
    } else {
      const auto deltas =
          cartesian_history_deltas(track.history, pose, params.config.history_steps);
      std::vector<double> y;
      if (params.decoder == DecoderKind::kPbpCartesian) {
        const auto raw_p = path_raw_feature(scene.map, path, pose);
        const auto z_p = params.path_encoder.forward(std::span(raw_p.data(), raw_p.size()));
        y = params.cartesian_regressor.forward(concat(f_a, z_p, deltas));
      } else {  // goal-based
        const auto raw_g = goal_raw_feature(scene.map, path, pose);
        const auto z_g = params.goal_encoder.forward(std::span(raw_g.data(), raw_g.size()));
        y = params.goal_regressor.forward(concat(f_a, z_g, deltas));
      }
      for (const Vec2& local : outputs_to_agent_frame(y, horizon))
        waypoints.push_back(from_agent_frame(local, pose));
    }
    out.trajectories.push_back(std::move(waypoints));
    out.probabilities.push_back(sel.probability);
    out.mode_paths.emplace_back(path.segment_ids);
  }

  // Fewer distinct paths than modes: pad with zero-probability repeats so the
  // prediction always carries exactly K trajectories.
  std::size_t cycle = 0;
  while (static_cast<int>(out.trajectories.size()) < k) {
    out.trajectories.push_back(out.trajectories[cycle]);
    out.probabilities.push_back(0.0);
    out.mode_paths.push_back(out.mode_paths[cycle]);
    cycle = (cycle + 1) % selections.size();
  }
  return out;
}

std::string prediction_to_json(const PredictionSet& preds, int agent_id) {
  nlohmann::json doc;
  doc["agent_id"] = agent_id;
  nlohmann::json modes = nlohmann::json::array();
  for (std::size_t m = 0; m < preds.trajectories.size(); ++m) {
    nlohmann::json mode;
    mode["probability"] = preds.probabilities[m];
    nlohmann::json waypoints = nlohmann::json::array();
    for (const Vec2& p : preds.trajectories[m]) waypoints.push_back({p.x, p.y});
    mode["waypoints"] = waypoints;
    if (preds.mode_paths[m])
      mode["path_segment_ids"] = *preds.mode_paths[m];
    else
      mode["path_segment_ids"] = nullptr;
    modes.push_back(std::move(mode));
  }
  doc["modes"] = modes;
  return doc.dump();
}

std::pair<PredictionSet, int> prediction_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(err::kParse,
                "malformed prediction JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  PredictionSet preds;
  for (const auto& mode : doc.at("modes")) {
    preds.probabilities.push_back(mode.at("probability").get<double>());
    std::vector<Vec2> traj;
    for (const auto& wp : mode.at("waypoints"))
      traj.push_back({wp.at(0).get<double>(), wp.at(1).get<double>()});
    preds.trajectories.push_back(std::move(traj));
    if (mode.at("path_segment_ids").is_null())
      preds.mode_paths.push_back(std::nullopt);
    else
      preds.mode_paths.push_back(mode.at("path_segment_ids").get<std::vector<int>>());
  }
  return {std::move(preds), doc.at("agent_id").get<int>()};
}

}  // namespace pbp
