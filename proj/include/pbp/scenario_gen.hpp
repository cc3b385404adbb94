#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbp/lane_graph.hpp"

namespace pbp {

enum class Layout { kStraight, kCurve, kFork, kMerge, kGrid, kLaneChange };

Layout layout_from_name(const std::string& name);  // throws E_CONFIG on bad name
std::string layout_name(Layout layout);

struct GenConfig {
  std::uint64_t seed = 1;
  Layout layout = Layout::kStraight;
  int n_scenes = 1;
  double speed_min = 3.0;   // m/s
  double speed_max = 12.0;  // m/s
  double lateral_noise_sigma = 0.15;
  double path_free_fraction = 0.0;
  int history_steps = 20;  // T'
  int horizon_steps = 30;  // T
  double dt = 0.1;
};

// Deterministic synthetic scenes: the focal agent follows a lane route at a
// sampled speed with per-waypoint lateral Gaussian noise; a path_free_fraction
// of scenes instead get a straight kinematic track placed clear of the map.
// Every scene carries a ground-truth future and is rigidly randomized
// (rotation + translation) so headings cover all directions.
std::vector<Scene> generate(const GenConfig& config);

// Seeded shuffle, then split into disjoint, exhaustive train/validation sets.
std::pair<std::vector<Scene>, std::vector<Scene>> split(std::vector<Scene> scenes,
                                                        double train_fraction,
                                                        std::uint64_t seed);

// Writes one scenario JSON per scene: <dir>/scene_000000.json, ...
void write_scenes(const std::vector<Scene>& scenes, const std::string& dir,
                  int index_offset = 0);

}  // namespace pbp
