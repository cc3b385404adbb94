#include "pbp/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "pbp/error.hpp"

namespace pbp {

TrainingSample preprocess_scene(const Scene& scene, const ModelConfig& config,
                                const SamplerParams& sampler) {
  const AgentTrack& track = scene.focal_agent();
  TrainingSample sample;
  sample.agent_id = track.id;
  sample.pose = estimate_pose(track.history, scene.dt);
  sample.agent_feature = encode_agent(track.history, scene.dt, config.agent_dim);
  sample.has_future = track.future.has_value();

  sample.candidates.agent_id = track.id;
  const auto seeds = select_seed_segments(scene.map, sample.pose.position,
                                          sample.pose.heading, sampler.seed_radius_m,
                                          sampler.seed_max_angle_deg * M_PI / 180.0);
  const double max_len = sampler.max_length_for_speed(
      sample.pose.speed, config.horizon_steps * scene.dt);
  sample.candidates.paths = sample_candidate_paths(scene.map, seeds, sampler.path_min_len_m,
                                                   max_len, sampler.max_paths);

  sample.path_raw.reserve(sample.candidates.paths.size());
  sample.agent_path_raw.reserve(sample.candidates.paths.size());
  sample.goal_raw.reserve(sample.candidates.paths.size());
  for (const ReferencePath& path : sample.candidates.paths) {
    sample.path_raw.push_back(path_raw_feature(scene.map, path, sample.pose));
    sample.agent_path_raw.push_back(agent_path_raw_feature(scene.map, path, sample.pose));
    sample.goal_raw.push_back(goal_raw_feature(scene.map, path, sample.pose));
  }

  if (!sample.has_future) return sample;

  const auto& future = *track.future;
  const auto gt = assign_ground_truth(sample.candidates.paths, future,
                                      sampler.path_free_threshold_m);
  sample.candidates.gt_index = gt.gt_index;
  sample.candidates.is_path_free = gt.is_path_free;
  sample.is_path_free = gt.is_path_free;

  sample.hist_cartesian_deltas =
      cartesian_history_deltas(track.history, sample.pose, config.history_steps);
  sample.gt_agent_frame.reserve(future.size());
  for (const Vec2& p : future) sample.gt_agent_frame.push_back(to_agent_frame(p, sample.pose));

  if (sample.on_path()) {
    const ReferencePath& gt_path = sample.candidates.paths[*sample.candidates.gt_index];
    const FrenetTrajectory hist = trajectory_to_frenet(gt_path, track.history);
    sample.hist_frenet_deltas = frenet_history_deltas(hist, config.history_steps);
    sample.s0 = hist.states.back().s;

    // Continue the monotonic-s projection from the end of the history.
    std::vector<Vec2> joined = track.history;
    joined.insert(joined.end(), future.begin(), future.end());
    const FrenetTrajectory all = trajectory_to_frenet(gt_path, joined);
    sample.gt_frenet.assign(all.states.end() - future.size(), all.states.end());
  }
  return sample;
}

std::vector<std::string> list_scene_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(err::kIo, "not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(err::kIo, "no scenario files in " + dir);
  return files;
}

std::vector<Scene> load_scenes(const std::string& dir) {
  std::vector<Scene> scenes;
  for (const std::string& file : list_scene_files(dir)) scenes.push_back(load_scene_file(file));
  return scenes;
}

}  // namespace pbp
