#include "pbp/scenario_gen.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

#include "pbp/error.hpp"
#include "pbp/frenet.hpp"
#include "pbp/path_sampler.hpp"

namespace pbp {

namespace {

constexpr double kLaneWidth = 3.5;
constexpr double kChord = 3.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Accumulates segments, links, corridor polygons, and drivable routes while a
// layout is being laid out in its canonical frame.
struct MapBuild {
  std::vector<LaneSegment> segments;
  std::map<int, std::vector<int>> successors;
  std::vector<std::vector<Vec2>> polygons;
  std::vector<std::vector<int>> routes;  // candidate driving routes (segment ids)
  int next_id = 0;

  // Chain of chords through `pts`; returns the new segment ids.
  std::vector<int> add_chain(const std::vector<Vec2>& pts) {
    std::vector<int> ids;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      LaneSegment seg;
      seg.id = next_id++;
      seg.start = pts[i];
      seg.end = pts[i + 1];
      segments.push_back(seg);
      if (!ids.empty()) successors[ids.back()].push_back(seg.id);
      ids.push_back(seg.id);
    }
    return ids;
  }

  void link(int from, int to) { successors[from].push_back(to); }

  // Corridor polygon around a centerline: left offsets forward, right
  // offsets reversed.
  void add_strip(const std::vector<Vec2>& pts, double half_width) {
    std::vector<Vec2> left, right;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = std::min(i + 1, pts.size() - 1);
      const Vec2 n = (pts[b] - pts[a]).normalized().left_normal();
      left.push_back(pts[i] + n * half_width);
      right.push_back(pts[i] - n * half_width);
    }
    std::vector<Vec2> poly = left;
    poly.insert(poly.end(), right.rbegin(), right.rend());
    polygons.push_back(std::move(poly));
  }
};

std::vector<Vec2> line_points(const Vec2& start, const Vec2& dir, double length,
                              double chord = kChord) {
  const int n = std::max(1, static_cast<int>(std::round(length / chord)));
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  for (int i = 0; i <= n; ++i) pts.push_back(start + dir * (length * i / n));
  return pts;
}

std::vector<Vec2> arc_points(const Vec2& center, double radius, double angle0,
                             double sweep, double chord = kChord) {
  const double arc_len = std::abs(sweep) * radius;
  const int n = std::max(2, static_cast<int>(std::round(arc_len / chord)));
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double a = angle0 + sweep * i / n;
    pts.push_back(center + Vec2{std::cos(a), std::sin(a)} * radius);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Layouts, each in its own canonical frame.
// ---------------------------------------------------------------------------

MapBuild build_straight(std::mt19937_64&, int n_lanes = 3, double length = 120.0) {
  MapBuild map;
  for (int lane = 0; lane < n_lanes; ++lane) {
    const auto pts = line_points({0.0, lane * kLaneWidth}, {1.0, 0.0}, length);
    map.routes.push_back(map.add_chain(pts));
  }
  // One corridor covering all lanes.
  const double mid = (n_lanes - 1) * kLaneWidth / 2.0;
  std::vector<Vec2> center = line_points({0.0, mid}, {1.0, 0.0}, length);
  map.add_strip(center, mid + kLaneWidth / 2.0);
  return map;
}

MapBuild build_curve(std::mt19937_64& rng) {
  MapBuild map;
  std::uniform_real_distribution<double> radius_dist(25.0, 60.0);
  const double radius = radius_dist(rng);
  const bool left = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  const double arc_len = std::min(130.0, radius * 2.0);  // cap the sweep
  const double sweep = (left ? 1.0 : -1.0) * arc_len / radius;
  const Vec2 center{0.0, left ? radius : -radius};
  const double angle0 = left ? -M_PI / 2.0 : M_PI / 2.0;

  for (int lane = 0; lane < 2; ++lane) {
    // Positive lane offsets sit left of travel: larger radius on right turns.
    const double r = left ? radius - lane * kLaneWidth : radius + lane * kLaneWidth;
    map.routes.push_back(map.add_chain(arc_points(center, r, angle0, sweep)));
  }
  const double mid_r = left ? radius - kLaneWidth / 2.0 : radius + kLaneWidth / 2.0;
  map.add_strip(arc_points(center, mid_r, angle0, sweep), kLaneWidth);
  return map;
}

MapBuild build_fork(std::mt19937_64& rng) {
  MapBuild map;
  const double stem_len = 66.0;
  const auto stem_pts = line_points({0.0, 0.0}, {1.0, 0.0}, stem_len);
  const auto stem = map.add_chain(stem_pts);
  map.add_strip(stem_pts, kLaneWidth / 2.0);

  const auto straight_pts = line_points({stem_len, 0.0}, {1.0, 0.0}, 66.0);
  const auto straight = map.add_chain(straight_pts);
  map.add_strip(straight_pts, kLaneWidth / 2.0);
  map.link(stem.back(), straight.front());

  // Off-ramp arcs away from the stem.
  std::uniform_real_distribution<double> radius_dist(40.0, 80.0);
  const double radius = radius_dist(rng);
  const bool left = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  const Vec2 center{stem_len, left ? radius : -radius};
  const double angle0 = left ? -M_PI / 2.0 : M_PI / 2.0;
  const double sweep = (left ? 1.0 : -1.0) * 66.0 / radius;
  const auto ramp_pts = arc_points(center, radius, angle0, sweep);
  const auto ramp = map.add_chain(ramp_pts);
  map.add_strip(ramp_pts, kLaneWidth / 2.0);
  map.link(stem.back(), ramp.front());

  for (const auto& branch : {straight, ramp}) {
    std::vector<int> route = stem;
    route.insert(route.end(), branch.begin(), branch.end());
    map.routes.push_back(route);
  }
  return map;
}

MapBuild build_merge(std::mt19937_64& rng) {
  MapBuild map;
  const Vec2 junction{0.0, 0.0};
  const auto out_pts = line_points(junction, {1.0, 0.0}, 72.0);
  const auto out = map.add_chain(out_pts);
  map.add_strip(out_pts, kLaneWidth / 2.0);

  const auto main_pts = line_points({-66.0, 0.0}, {1.0, 0.0}, 66.0);
  const auto main_in = map.add_chain(main_pts);
  map.add_strip(main_pts, kLaneWidth / 2.0);
  map.link(main_in.back(), out.front());

  // Entry ramp arcing in from the side, ending exactly at the junction
  // heading +x.
  std::uniform_real_distribution<double> radius_dist(60.0, 120.0);
  const double radius = radius_dist(rng);
  const bool from_left = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  const Vec2 center{0.0, from_left ? radius : -radius};
  const double sweep = 60.0 / radius;
  const auto ramp_pts =
      arc_points(center, radius, from_left ? -M_PI / 2.0 - sweep : M_PI / 2.0 + sweep,
                 from_left ? sweep : -sweep);
  const auto ramp = map.add_chain(ramp_pts);
  map.add_strip(ramp_pts, kLaneWidth / 2.0);
  map.link(ramp.back(), out.front());

  for (const auto& entry : {main_in, ramp}) {
    std::vector<int> route = entry;
    route.insert(route.end(), out.begin(), out.end());
    map.routes.push_back(route);
  }
  return map;
}

MapBuild build_grid(std::mt19937_64& rng) {
  MapBuild map;
  const int n_streets = 6;
  const double spacing = 15.0;
  const double extent = (n_streets - 1) * spacing + 2.0 * spacing;

  std::vector<std::vector<int>> east(n_streets), north(n_streets);
  for (int r = 0; r < n_streets; ++r) {
    const double y = r * spacing;
    const auto pts = line_points({-spacing, y}, {1.0, 0.0}, extent);
    east[r] = map.add_chain(pts);
    map.add_strip(pts, kLaneWidth / 2.0);
  }
  for (int c = 0; c < n_streets; ++c) {
    const double x = c * spacing;
    const auto pts = line_points({x, -spacing}, {0.0, 1.0}, extent);
    north[c] = map.add_chain(pts);
    map.add_strip(pts, kLaneWidth / 2.0);
  }

  // Connect turns where chord joints coincide at intersections.
  const auto joint_index = [&](double coord) {
    return static_cast<int>(std::round((coord + spacing) / kChord));
  };
  for (int r = 0; r < n_streets; ++r)
    for (int c = 0; c < n_streets; ++c) {
      const int ei = joint_index(c * spacing);  // chord ending at the crossing
      const int ni = joint_index(r * spacing);
      if (ei - 1 >= 0 && ei - 1 < static_cast<int>(east[r].size()) &&
          ni < static_cast<int>(north[c].size()))
        map.link(east[r][ei - 1], north[c][ni]);
      if (ni - 1 >= 0 && ni - 1 < static_cast<int>(north[c].size()) &&
          ei < static_cast<int>(east[r].size()))
        map.link(north[c][ni - 1], east[r][ei]);
    }

  // Routes: random successor walks from each street start.
  std::uniform_int_distribution<int> pick_row(0, n_streets - 1);
  for (int route_i = 0; route_i < 8; ++route_i) {
    const bool start_east = route_i % 2 == 0;
    std::vector<int> route;
    int cur = start_east ? east[pick_row(rng)].front() : north[pick_row(rng)].front();
    route.push_back(cur);
    for (int step = 0; step < 64; ++step) {
      const auto& succ = map.successors.count(cur) ? map.successors[cur] : std::vector<int>{};
      if (succ.empty()) break;
      cur = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
      route.push_back(cur);
    }
    if (route.size() > 20) map.routes.push_back(route);
  }
  if (map.routes.empty()) map.routes.push_back(east[0]);
  return map;
}

// Sorting helper: every successor list ascending (the LaneGraph ctor would
// also sort, but routes reference ids directly).
LaneGraph finish_map(MapBuild& map) {
  return LaneGraph(map.segments, map.successors, map.polygons);
}

// ---------------------------------------------------------------------------
// Track synthesis
// ---------------------------------------------------------------------------

struct TrackSpec {
  std::vector<Vec2> points;  // history + future, oldest first
};

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Arc lengths of polyline vertices where the route direction turns sharply
// (grid corners). The agent's current-time position is kept away from them so
// its heading estimate stays aligned with a lane direction.
std::vector<double> kink_arclengths(const ReferencePath& path) {
  std::vector<double> kinks;
  for (std::size_t i = 1; i + 1 < path.polyline.size(); ++i) {
    const Vec2 a = (path.polyline[i] - path.polyline[i - 1]).normalized();
    const Vec2 b = (path.polyline[i + 1] - path.polyline[i]).normalized();
    if (std::abs(wrap_angle(b.angle() - a.angle())) > M_PI / 6.0)
      kinks.push_back(path.cum_arclength[i]);
  }
  return kinks;
}

// Rides a route at constant speed with temporally correlated lateral noise
// (AR(1), per-waypoint marginal N(0, sigma^2)); for lane changes the lateral
// offset blends from 0 to `lane_shift` across a window centred just after the
// current timestep.
TrackSpec ride_route(const LaneGraph& graph, const std::vector<int>& route, double speed,
                     double noise_sigma, int total_steps, int history_steps, double dt,
                     double lane_shift, std::mt19937_64& rng) {
  const ReferencePath path = make_reference_path(graph, route);
  const double travel = speed * dt * (total_steps - 1);
  const double margin = 2.0;
  const double usable = path.length() - 2.0 * margin;
  double v = speed;
  if (travel > usable) v = usable / (dt * (total_steps - 1));  // slow down to fit
  std::uniform_real_distribution<double> start_dist(0.0, std::max(0.0, usable - v * dt *
                                                                            (total_steps - 1)));
  const std::vector<double> kinks = kink_arclengths(path);
  double s_begin = margin + start_dist(rng);
  for (int attempt = 0; attempt < 32; ++attempt) {
    const double s_now = s_begin + v * dt * (history_steps - 1);
    bool clear = true;
    for (double k : kinks) clear = clear && std::abs(s_now - k) > 5.0;
    if (clear) break;
    s_begin = margin + start_dist(rng);
  }

  std::normal_distribution<double> unit(0.0, 1.0);
  constexpr double kRho = 0.9;
  double w = unit(rng);
  TrackSpec track;
  track.points.reserve(total_steps);
  // Lane-change window: starts 5 steps before "now", ends 15 steps after.
  const int shift_start = history_steps - 5;
  const int shift_end = history_steps + 15;
  for (int i = 0; i < total_steps; ++i) {
    const double s = s_begin + v * dt * i;
    double d = noise_sigma * w;
    w = kRho * w + std::sqrt(1.0 - kRho * kRho) * unit(rng);
    if (lane_shift != 0.0)
      d += lane_shift * smoothstep(static_cast<double>(i - shift_start) /
                                   static_cast<double>(shift_end - shift_start));
    track.points.push_back(frenet_to_cartesian(path, {s, d}));
  }
  return track;
}

// Straight kinematic track ignoring the map, placed so every point stays
// well clear of all lane segments (no seed segments, no nearby candidates).
TrackSpec off_map_track(const LaneGraph& graph, double speed, int total_steps, double dt,
                        std::mt19937_64& rng) {
  Vec2 lo{1e18, 1e18}, hi{-1e18, -1e18};
  for (const LaneSegment& seg : graph.segments()) {
    for (const Vec2& p : {seg.start, seg.end}) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  }
  const Vec2 mid = (lo + hi) * 0.5;
  std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * M_PI);
  const double heading = angle_dist(rng);
  const double place_angle = angle_dist(rng);
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  const double map_radius = (hi - lo).norm() / 2.0;

  for (double offset = map_radius + 20.0;; offset += 15.0) {
    const Vec2 start = mid + Vec2{std::cos(place_angle), std::sin(place_angle)} * offset;
    TrackSpec track;
    bool clear = true;
    for (int i = 0; i < total_steps; ++i) {
      const Vec2 p = start + dir * (speed * dt * i);
      track.points.push_back(p);
      double nearest = 1e18;
      for (const LaneSegment& seg : graph.segments())
        nearest = std::min(nearest, point_segment_distance(seg.start, seg.end, p));
      clear = clear && nearest > 15.0;
    }
    if (clear) return track;
  }
}

}  // namespace

Layout layout_from_name(const std::string& name) {
  if (name == "straight") return Layout::kStraight;
  if (name == "curve") return Layout::kCurve;
  if (name == "fork") return Layout::kFork;
  if (name == "merge") return Layout::kMerge;
  if (name == "grid") return Layout::kGrid;
  if (name == "lane_change") return Layout::kLaneChange;
  throw Error(err::kConfig, "unknown layout '" + name + "'");
}

std::string layout_name(Layout layout) {
  switch (layout) {
    case Layout::kStraight:
      return "straight";
    case Layout::kCurve:
      return "curve";
    case Layout::kFork:
      return "fork";
    case Layout::kMerge:
      return "merge";
    case Layout::kGrid:
      return "grid";
    case Layout::kLaneChange:
      return "lane_change";
  }
  throw Error(err::kConfig, "unknown layout");
}

std::vector<Scene> generate(const GenConfig& config) {
  if (config.n_scenes < 1) throw Error(err::kConfig, "n_scenes must be >= 1");
  if (config.speed_min > config.speed_max)
    throw Error(err::kConfig, "speed_range min exceeds max");
  if (config.path_free_fraction < 0.0 || config.path_free_fraction > 1.0)
    throw Error(err::kConfig, "path_free_fraction must lie in [0,1]");

  std::vector<Scene> scenes;
  scenes.reserve(config.n_scenes);
  const int total_steps = config.history_steps + config.horizon_steps;

  for (int i = 0; i < config.n_scenes; ++i) {
    std::mt19937_64 rng(splitmix64(config.seed + static_cast<std::uint64_t>(i)));

    MapBuild build;
    switch (config.layout) {
      case Layout::kStraight:
      case Layout::kLaneChange:
        build = build_straight(rng);
        break;
      case Layout::kCurve:
        build = build_curve(rng);
        break;
      case Layout::kFork:
        build = build_fork(rng);
        break;
      case Layout::kMerge:
        build = build_merge(rng);
        break;
      case Layout::kGrid:
        build = build_grid(rng);
        break;
    }
    LaneGraph canonical = finish_map(build);

    std::uniform_real_distribution<double> speed_dist(config.speed_min, config.speed_max);
    const double speed = speed_dist(rng);

    // Evenly spaced path-free scene indices give exact label counts.
    const double f = config.path_free_fraction;
    const bool path_free = std::floor((i + 1) * f + 1e-9) > std::floor(i * f + 1e-9);

    TrackSpec track;
    if (path_free) {
      track = off_map_track(canonical, speed, total_steps, config.dt, rng);
    } else {
      std::uniform_int_distribution<std::size_t> route_dist(0, build.routes.size() - 1);
      std::vector<int> route = build.routes[route_dist(rng)];
      double lane_shift = 0.0;
      if (config.layout == Layout::kLaneChange) {
        // Start on lane 0 or 2 of the three-lane road, shift to the middle,
        // or start in the middle and shift either way.
        std::uniform_int_distribution<int> lane_dist(0, 2);
        const int src = lane_dist(rng);
        route = build.routes[src];
        lane_shift = src == 0 ? kLaneWidth : (src == 2 ? -kLaneWidth : kLaneWidth);
      }
      track = ride_route(canonical, route, speed, config.lateral_noise_sigma, total_steps,
                         config.history_steps, config.dt, lane_shift, rng);
    }

    // Rigid scene randomization.
    std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> shift_dist(-200.0, 200.0);
    const double theta = angle_dist(rng);
    const Vec2 shift{shift_dist(rng), shift_dist(rng)};
    const auto transform = [&](const Vec2& p) { return p.rotated(theta) + shift; };

    std::vector<LaneSegment> segments = build.segments;
    for (LaneSegment& seg : segments) {
      seg.start = transform(seg.start);
      seg.end = transform(seg.end);
    }
    std::vector<std::vector<Vec2>> polygons = build.polygons;
    for (auto& poly : polygons)
      for (Vec2& p : poly) p = transform(p);

    Scene scene;
    scene.map = LaneGraph(std::move(segments), build.successors, std::move(polygons));
    scene.dt = config.dt;
    scene.focal_agent_id = 0;
    AgentTrack agent;
    agent.id = 0;
    for (int s = 0; s < config.history_steps; ++s)
      agent.history.push_back(transform(track.points[s]));
    std::vector<Vec2> future;
    for (int s = config.history_steps; s < total_steps; ++s)
      future.push_back(transform(track.points[s]));
    agent.future = std::move(future);
    scene.agents.push_back(std::move(agent));
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

std::pair<std::vector<Scene>, std::vector<Scene>> split(std::vector<Scene> scenes,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw Error(err::kConfig, "train_fraction must lie strictly between 0 and 1");
  std::vector<std::size_t> order(scenes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(train_fraction * scenes.size() + 0.5));
  std::pair<std::vector<Scene>, std::vector<Scene>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_train)
      out.first.push_back(std::move(scenes[order[i]]));
    else
      out.second.push_back(std::move(scenes[order[i]]));
  }
  return out;
}

void write_scenes(const std::vector<Scene>& scenes, const std::string& dir,
                  int index_offset) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%06d.json",
                  static_cast<int>(i) + index_offset);
    save_scene_file(scenes[i], (std::filesystem::path(dir) / name).string());
  }
}

}  // namespace pbp
