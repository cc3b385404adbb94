#include "pbp/path_sampler.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "pbp/error.hpp"

namespace pbp {

ReferencePath make_reference_path(const LaneGraph& graph,
                                  const std::vector<int>& segment_ids) {
  if (segment_ids.empty())
    throw Error(err::kGeometry, "reference path needs at least one segment");
  ReferencePath path;
  path.segment_ids = segment_ids;
  const LaneSegment& first = graph.segment(segment_ids.front());
  path.polyline.push_back(first.start);
  for (int id : segment_ids) {
    const LaneSegment& seg = graph.segment(id);
    // Bridge small successor gaps with an extra chord; drop exact duplicates.
    if ((seg.start - path.polyline.back()).norm() > 1e-9)
      path.polyline.push_back(seg.start);
    path.polyline.push_back(seg.end);
  }
  path.cum_arclength.resize(path.polyline.size());
  path.cum_arclength[0] = 0.0;
  for (std::size_t i = 1; i < path.polyline.size(); ++i)
    path.cum_arclength[i] =
        path.cum_arclength[i - 1] + (path.polyline[i] - path.polyline[i - 1]).norm();
  return path;
}

std::vector<int> select_seed_segments(const LaneGraph& graph, const Vec2& position,
                                      double heading, double radius, double max_angle) {
  struct Hit {
    double distance;
    int id;
  };
  std::vector<Hit> hits;
  for (const LaneSegment& seg : graph.segments()) {
    const double d = point_segment_distance(seg.start, seg.end, position);
    if (d > radius) continue;
    const double delta = wrap_angle(seg.direction.angle() - heading);
    if (std::abs(delta) > max_angle) continue;
    hits.push_back({d, seg.id});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  std::vector<int> out;
  out.reserve(hits.size());
  for (const Hit& h : hits) out.push_back(h.id);
  return out;
}

std::vector<ReferencePath> sample_candidate_paths(const LaneGraph& graph,
                                                  const std::vector<int>& seeds,
                                                  double min_length, double max_length,
                                                  int max_paths) {
  if (min_length > max_length)
    throw Error(err::kConfig, "path min_length exceeds max_length");
  if (max_paths < 1) throw Error(err::kConfig, "max_paths must be >= 1");

  struct State {
    std::vector<int> ids;
    double length;
  };
  std::deque<State> frontier;
  for (int seed : seeds)
    frontier.push_back({{seed}, graph.segment(seed).length()});

  struct Emitted {
    std::vector<int> ids;
    double length;
  };
  std::vector<Emitted> emitted;
  std::set<std::vector<int>> seen;
  // Enumeration guard for pathological graphs; synthetic scenes stay far below.
  const std::size_t state_cap = 200000;
  std::size_t expanded = 0;

  while (!frontier.empty() && expanded < state_cap) {
    State state = std::move(frontier.front());
    frontier.pop_front();
    ++expanded;

    bool emit = state.length >= min_length;
    bool extended = false;
    for (int succ : graph.successors(state.ids.back())) {
      const double new_len = state.length + graph.segment(succ).length();
      if (new_len > max_length) continue;
      State next;
      next.ids = state.ids;
      next.ids.push_back(succ);
      next.length = new_len;
      frontier.push_back(std::move(next));
      extended = true;
    }
    if (!extended) emit = true;  // dead end or every extension over-length

    if (emit && seen.insert(state.ids).second)
      emitted.push_back({std::move(state.ids), state.length});
  }

  std::stable_sort(emitted.begin(), emitted.end(),
                   [](const Emitted& a, const Emitted& b) { return a.length < b.length; });
  if (emitted.size() > static_cast<std::size_t>(max_paths))
    emitted.resize(static_cast<std::size_t>(max_paths));

  std::vector<ReferencePath> out;
  out.reserve(emitted.size());
  for (const Emitted& e : emitted) out.push_back(make_reference_path(graph, e.ids));
  return out;
}

GroundTruthAssignment assign_ground_truth(const std::vector<ReferencePath>& paths,
                                          const std::vector<Vec2>& future,
                                          double path_free_threshold) {
  GroundTruthAssignment result;
  if (paths.empty() || future.empty()) {
    result.is_path_free = true;
    return result;
  }

  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    double sum = 0.0;
    for (const Vec2& p : future) sum += point_polyline_distance(paths[i].polyline, p);
    const double cost = sum / static_cast<double>(future.size()) +
                        (future.back() - paths[i].endpoint()).norm();
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }

  double worst = 0.0;
  for (const Vec2& p : future)
    worst = std::max(worst, point_polyline_distance(paths[best].polyline, p));
  if (worst > path_free_threshold) {
    result.is_path_free = true;
  } else {
    result.gt_index = best;
  }
  return result;
}

}  // namespace pbp
