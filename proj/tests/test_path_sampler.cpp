#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "pbp/error.hpp"
#include "pbp/frenet.hpp"
#include "pbp/path_sampler.hpp"
#include "test_util.hpp"

using pbp::Vec2;

TEST_CASE("select_seed_segments: straight lane basics") {
  auto graph = fixture::chain(10, 10.0);  // 100 m of lane along +x

  SUBCASE("agent on the lane finds nearby same-direction segments") {
    const auto seeds = graph.nearest_segment({35.0, 0.0});  // sanity: on segment 3
    CHECK(seeds.first == 3);
    const auto ids = pbp::select_seed_segments(graph, {35.0, 0.0}, 0.0, 10.0, M_PI / 3.0);
    // Segments within 10 m of x=35: [20,30],[30,40],[40,50] at least.
    CHECK(std::set<int>(ids.begin(), ids.end()).count(3) == 1);
    CHECK(ids.front() == 3);  // sorted by distance, the containing segment first
    for (int id : ids) CHECK(std::abs(id - 3) <= 2);
  }

  SUBCASE("opposite heading yields nothing") {
    const auto ids = pbp::select_seed_segments(graph, {35.0, 0.0}, M_PI, 10.0, M_PI / 3.0);
    CHECK(ids.empty());
  }
}

TEST_CASE("select_seed_segments matches an exhaustive filter on 3 parallel lanes") {
  auto graph = fixture::parallel_lanes(3, 20, 5.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.0, 100.0), uy(-2.0, 9.0), uh(-0.6, 0.6);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 pos{ux(rng), uy(rng)};
    const double heading = uh(rng);
    const double radius = 10.0, max_angle = M_PI / 3.0;
    const auto got = pbp::select_seed_segments(graph, pos, heading, radius, max_angle);

    std::set<int> expected;
    for (const auto& seg : graph.segments()) {
      const double d = oracle::point_segment_distance(seg.start.x, seg.start.y, seg.end.x,
                                                      seg.end.y, pos.x, pos.y);
      double delta = seg.direction.angle() - heading;
      while (delta > M_PI) delta -= 2.0 * M_PI;
      while (delta < -M_PI) delta += 2.0 * M_PI;
      if (d <= radius && std::abs(delta) <= max_angle) expected.insert(seg.id);
    }
    CHECK(std::set<int>(got.begin(), got.end()) == expected);
    // Sorted by ascending distance.
    for (std::size_t i = 1; i < got.size(); ++i) {
      const auto& a = graph.segment(got[i - 1]);
      const auto& b = graph.segment(got[i]);
      CHECK(pbp::point_segment_distance(a.start, a.end, pos) <=
            pbp::point_segment_distance(b.start, b.end, pos) + 1e-12);
    }
  }
}

TEST_CASE("sample_candidate_paths: 5-segment chain emits 20/30/40/50 m paths") {
  auto graph = fixture::chain(5, 10.0);
  const auto paths = pbp::sample_candidate_paths(graph, {0}, 20.0, 50.0, 1024);
  REQUIRE(paths.size() == 4);
  CHECK(paths[0].length() == doctest::Approx(20.0));
  CHECK(paths[1].length() == doctest::Approx(30.0));
  CHECK(paths[2].length() == doctest::Approx(40.0));
  CHECK(paths[3].length() == doctest::Approx(50.0));
  CHECK(paths[0].segment_ids == std::vector<int>{0, 1});
  CHECK(paths[3].segment_ids == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("sample_candidate_paths: Y-fork reaches both branches") {
  auto graph = fixture::y_fork(2, 2, 10.0);  // stem ids 0,1; up 2,3; down 4,5
  const auto paths = pbp::sample_candidate_paths(graph, {0}, 25.0, 45.0, 1024);
  bool up = false, down = false;
  for (const auto& p : paths) {
    for (int id : p.segment_ids) {
      up = up || id == 2 || id == 3;
      down = down || id == 4 || id == 5;
    }
  }
  CHECK(up);
  CHECK(down);
}

TEST_CASE("sample_candidate_paths: connectivity, bounds, determinism, dedup") {
  auto graph = fixture::y_fork(3, 4, 7.0);
  const auto seeds = std::vector<int>{0, 1};
  const auto paths = pbp::sample_candidate_paths(graph, seeds, 10.0, 60.0, 1024);
  REQUIRE(!paths.empty());

  std::set<std::vector<int>> unique_sequences;
  for (const auto& p : paths) {
    // Starts at a seed.
    CHECK((p.segment_ids.front() == 0 || p.segment_ids.front() == 1));
    // Every hop respects the successor relation.
    for (std::size_t i = 1; i < p.segment_ids.size(); ++i) {
      const auto& succ = graph.successors(p.segment_ids[i - 1]);
      CHECK(std::find(succ.begin(), succ.end(), p.segment_ids[i]) != succ.end());
    }
    // Length bounds (no dead-end shorter than min in this fixture reachable
    // below 10 m from these seeds).
    CHECK(p.length() <= 60.0 + 1e-12);
    // Arc-length table strictly increasing from zero.
    CHECK(p.cum_arclength.front() == 0.0);
    for (std::size_t i = 1; i < p.cum_arclength.size(); ++i)
      CHECK(p.cum_arclength[i] > p.cum_arclength[i - 1]);
    CHECK(unique_sequences.insert(p.segment_ids).second);  // no duplicates
  }

  // Deterministic: same call, identical output order.
  const auto again = pbp::sample_candidate_paths(graph, seeds, 10.0, 60.0, 1024);
  REQUIRE(again.size() == paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i)
    CHECK(again[i].segment_ids == paths[i].segment_ids);

  // Truncation keeps the shortest paths.
  const auto truncated = pbp::sample_candidate_paths(graph, seeds, 10.0, 60.0, 3);
  REQUIRE(truncated.size() == 3);
  for (std::size_t i = 0; i < truncated.size(); ++i)
    CHECK(truncated[i].segment_ids == paths[i].segment_ids);

  // Dead ends shorter than min_length still emit.
  const auto dead_end = pbp::sample_candidate_paths(graph, {5}, 100.0, 200.0, 16);
  REQUIRE(!dead_end.empty());
  CHECK(dead_end.front().length() < 100.0);
}

TEST_CASE("assign_ground_truth: future tracing a path picks it") {
  auto graph = fixture::y_fork(2, 3, 10.0);
  const auto paths = pbp::sample_candidate_paths(graph, {0}, 25.0, 55.0, 1024);
  REQUIRE(paths.size() >= 3);

  // Trace path 2's polyline as the future.
  const std::size_t target = 2;
  std::vector<Vec2> future;
  for (int t = 1; t <= 30; ++t) {
    const double s = paths[target].length() * t / 30.0;
    future.push_back(pbp::frenet_to_cartesian(paths[target], {s, 0.0}));
  }
  const auto gt = pbp::assign_ground_truth(paths, future, 5.0);
  REQUIRE(gt.gt_index.has_value());
  CHECK(*gt.gt_index == target);
  CHECK_FALSE(gt.is_path_free);
}

TEST_CASE("assign_ground_truth: perpendicular escape is path-free") {
  auto graph = fixture::chain(6, 10.0);
  const auto paths = pbp::sample_candidate_paths(graph, {0}, 20.0, 60.0, 1024);
  std::vector<Vec2> future;
  for (int t = 1; t <= 30; ++t) future.push_back({20.0, t * 20.0 / 30.0 + 2.0});
  const auto gt = pbp::assign_ground_truth(paths, future, 5.0);
  CHECK(gt.is_path_free);
  CHECK_FALSE(gt.gt_index.has_value());

  // Empty candidate list is path-free by definition.
  const auto empty = pbp::assign_ground_truth({}, future, 5.0);
  CHECK(empty.is_path_free);
  CHECK_FALSE(empty.gt_index.has_value());
}

TEST_CASE("assign_ground_truth matches the brute-force cost oracle") {
  auto graph = fixture::parallel_lanes(3, 16, 5.0);
  std::vector<int> seeds;
  for (int lane = 0; lane < 3; ++lane) seeds.push_back(lane * 16);
  const auto paths = pbp::sample_candidate_paths(graph, seeds, 15.0, 70.0, 1024);
  REQUIRE(paths.size() > 10);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uy(-1.0, 8.0), uspeed(0.8, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    // Synthetic lane-change-ish track drifting toward a random lateral goal.
    const double y0 = uy(rng), y1 = uy(rng), v = uspeed(rng);
    std::vector<Vec2> future;
    for (int t = 1; t <= 30; ++t) {
      const double u = t / 30.0;
      future.push_back({v * t, y0 + (y1 - y0) * u * u * (3 - 2 * u)});
    }
    const auto got = pbp::assign_ground_truth(paths, future, 5.0);

    const auto polyline_dist = [](const pbp::ReferencePath& path, const Vec2& p) {
      double d = 1e300;
      for (std::size_t j = 0; j + 1 < path.polyline.size(); ++j)
        d = std::min(d, oracle::point_segment_distance(path.polyline[j].x, path.polyline[j].y,
                                                       path.polyline[j + 1].x,
                                                       path.polyline[j + 1].y, p.x, p.y));
      return d;
    };
    double best_cost = 1e300;
    std::size_t best = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      double mean = 0.0;
      for (const Vec2& p : future) mean += polyline_dist(paths[i], p);
      mean /= future.size();
      const double cost = mean + (future.back() - paths[i].endpoint()).norm();
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    double worst = 0.0;
    for (const Vec2& p : future) worst = std::max(worst, polyline_dist(paths[best], p));

    if (worst > 5.0) {
      CHECK(got.is_path_free);  // track drifted beyond the 5 m rule
      CHECK_FALSE(got.gt_index.has_value());
    } else {
      REQUIRE(got.gt_index.has_value());
      CHECK(*got.gt_index == best);
    }
  }
}
