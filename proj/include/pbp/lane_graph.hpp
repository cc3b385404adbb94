#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbp/geometry.hpp"

namespace pbp {

// One straight lane-centerline chord. Curvature is represented by chaining
// short segments (target chord length 2-5 m).
struct LaneSegment {
  int id = -1;
  Vec2 start;
  Vec2 end;
  Vec2 direction;  // unit vector end - start

  double length() const { return (end - start).norm(); }
  Vec2 midpoint() const { return (start + end) * 0.5; }
};

// Maximum allowed gap between a segment's end and its successor's start.
inline constexpr double kSuccessorGapTolerance = 0.5;

class LaneGraph {
 public:
  LaneGraph() = default;
  LaneGraph(std::vector<LaneSegment> segments,
            std::map<int, std::vector<int>> successors,
            std::vector<std::vector<Vec2>> drivable_area);

  const std::vector<LaneSegment>& segments() const { return segments_; }
  const std::vector<std::vector<Vec2>>& drivable_area() const { return drivable_area_; }

  bool has_segment(int id) const { return index_by_id_.count(id) > 0; }
  const LaneSegment& segment(int id) const;
  // Successor ids, sorted ascending. Empty for terminal segments.
  const std::vector<int>& successors(int id) const;

  // Segment minimizing point-to-segment distance; ties within 1e-12 go to the
  // lowest segment id. Throws E_EMPTY_MAP on an empty graph.
  std::pair<int, double> nearest_segment(const Vec2& point) const;

  // True iff the point is inside or on the boundary of at least one
  // drivable-area polygon (even-odd rule, boundary counts as inside).
  bool contains_point(const Vec2& point) const;

  // Re-checks all type invariants; throws E_VALIDATE naming the offender.
  void validate() const;

 private:
  std::vector<LaneSegment> segments_;
  std::map<int, std::size_t> index_by_id_;
  std::map<int, std::vector<int>> successors_;
  std::vector<std::vector<Vec2>> drivable_area_;
  static const std::vector<int> kNoSuccessors;
};

struct AgentTrack {
  int id = -1;
  std::vector<Vec2> history;               // T' past positions, oldest first
  std::optional<std::vector<Vec2>> future; // T ground-truth positions, absent at inference
};

struct Scene {
  LaneGraph map;
  std::vector<AgentTrack> agents;
  int focal_agent_id = -1;
  double dt = 0.1;

  const AgentTrack& agent(int id) const;
  const AgentTrack& focal_agent() const { return agent(focal_agent_id); }
};

// Parses and validates one scenario JSON document.
// Throws E_PARSE (with byte offset) on malformed JSON and E_VALIDATE on
// schema or invariant violations.
Scene load_scene(std::istream& in);
Scene load_scene(const std::string& text);
Scene load_scene_file(const std::string& path);

std::string scene_to_json(const Scene& scene);
void save_scene_file(const Scene& scene, const std::string& path);

}  // namespace pbp
