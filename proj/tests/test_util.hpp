// Small graph fixtures shared across the test binaries.
#pragma once

#include <map>
#include <vector>

#include "pbp/lane_graph.hpp"

namespace fixture {

// id i spans x in [i*len, (i+1)*len) at y = 0; i -> i+1 links.
inline pbp::LaneGraph chain(int n_segments, double seg_len = 10.0) {
  std::vector<pbp::LaneSegment> segments;
  std::map<int, std::vector<int>> successors;
  for (int i = 0; i < n_segments; ++i) {
    pbp::LaneSegment seg;
    seg.id = i;
    seg.start = {i * seg_len, 0.0};
    seg.end = {(i + 1) * seg_len, 0.0};
    segments.push_back(seg);
    if (i + 1 < n_segments) successors[i] = {i + 1};
  }
  return pbp::LaneGraph(segments, successors, {});
}

// Stem 0..n-1 along +x, then two branches (up / down at 45 degrees).
inline pbp::LaneGraph y_fork(int stem_segments = 2, int branch_segments = 2,
                             double seg_len = 10.0) {
  std::vector<pbp::LaneSegment> segments;
  std::map<int, std::vector<int>> successors;
  int id = 0;
  for (int i = 0; i < stem_segments; ++i) {
    segments.push_back({id, {i * seg_len, 0.0}, {(i + 1) * seg_len, 0.0}, {}});
    if (i > 0) successors[id - 1] = {id};
    ++id;
  }
  const pbp::Vec2 fork{stem_segments * seg_len, 0.0};
  const double c = seg_len / std::sqrt(2.0);
  int up_first = id;
  for (int i = 0; i < branch_segments; ++i) {
    segments.push_back({id, fork + pbp::Vec2{i * c, i * c}, fork + pbp::Vec2{(i + 1) * c, (i + 1) * c}, {}});
    if (i > 0) successors[id - 1] = {id};
    ++id;
  }
  int down_first = id;
  for (int i = 0; i < branch_segments; ++i) {
    segments.push_back({id, fork + pbp::Vec2{i * c, -i * c}, fork + pbp::Vec2{(i + 1) * c, -(i + 1) * c}, {}});
    if (i > 0) successors[id - 1] = {id};
    ++id;
  }
  successors[stem_segments - 1] = {up_first, down_first};
  return pbp::LaneGraph(segments, successors, {});
}

// n parallel single-direction lanes along +x, lane spacing 3.5 m.
inline pbp::LaneGraph parallel_lanes(int n_lanes, int segs_per_lane, double seg_len = 5.0) {
  std::vector<pbp::LaneSegment> segments;
  std::map<int, std::vector<int>> successors;
  int id = 0;
  for (int lane = 0; lane < n_lanes; ++lane) {
    for (int i = 0; i < segs_per_lane; ++i) {
      const double y = lane * 3.5;
      segments.push_back({id, {i * seg_len, y}, {(i + 1) * seg_len, y}, {}});
      if (i > 0) successors[id - 1] = {id};
      ++id;
    }
  }
  return pbp::LaneGraph(segments, successors, {});
}

}  // namespace fixture
