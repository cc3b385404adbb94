#pragma once

#include <optional>
#include <vector>

#include "pbp/lane_graph.hpp"

namespace pbp {

// Ordered run of connected lane segments with a cumulative arc-length table.
struct ReferencePath {
  std::vector<int> segment_ids;
  std::vector<Vec2> polyline;          // joined endpoints, duplicates removed
  std::vector<double> cum_arclength;   // strictly increasing, starts at 0

  double length() const { return cum_arclength.back(); }
  Vec2 endpoint() const { return polyline.back(); }
};

// Builds the polyline/arc-length tables for a connected segment run.
ReferencePath make_reference_path(const LaneGraph& graph, const std::vector<int>& segment_ids);

struct CandidateSet {
  int agent_id = -1;
  std::vector<ReferencePath> paths;
  std::optional<std::size_t> gt_index;
  bool is_path_free = false;
};

struct SamplerParams {
  double seed_radius_m = 10.0;
  double seed_max_angle_deg = 60.0;
  double path_min_len_m = 5.0;
  // 0 means adaptive: 1.5 * (current speed * horizon seconds + 10 m).
  double path_max_len_m = 0.0;
  int max_paths = 1024;
  double path_free_threshold_m = 5.0;

  double max_length_for_speed(double speed, double horizon_s) const {
    if (path_max_len_m > 0.0) return path_max_len_m;
    return 1.5 * (speed * horizon_s + 10.0);
  }
};

// Segments within `radius` of `position` whose direction is within
// `max_angle` of `heading`, sorted by ascending distance (ties by id).
std::vector<int> select_seed_segments(const LaneGraph& graph, const Vec2& position,
                                      double heading, double radius, double max_angle);

// Breadth-first path enumeration from the seed segments. A run is emitted at
// every depth whose cumulative length reaches min_length, and when it cannot
// be extended (dead end, or any extension would exceed max_length). Output is
// deduplicated by segment-id sequence and sorted shortest-first; when more
// than max_paths runs are found the list is truncated.
std::vector<ReferencePath> sample_candidate_paths(const LaneGraph& graph,
                                                  const std::vector<int>& seeds,
                                                  double min_length, double max_length,
                                                  int max_paths);

struct GroundTruthAssignment {
  std::optional<std::size_t> gt_index;
  bool is_path_free = false;
};

// Picks the candidate minimizing mean waypoint-to-polyline distance plus an
// endpoint term; flags the agent path-free when the worst future waypoint is
// farther than `path_free_threshold` from that path.
GroundTruthAssignment assign_ground_truth(const std::vector<ReferencePath>& paths,
                                          const std::vector<Vec2>& future,
                                          double path_free_threshold);

}  // namespace pbp
