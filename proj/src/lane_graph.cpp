#include "pbp/lane_graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pbp/error.hpp"

namespace pbp {

using nlohmann::json;

const std::vector<int> LaneGraph::kNoSuccessors = {};

LaneGraph::LaneGraph(std::vector<LaneSegment> segments,
                     std::map<int, std::vector<int>> successors,
                     std::vector<std::vector<Vec2>> drivable_area)
    : segments_(std::move(segments)),
      successors_(std::move(successors)),
      drivable_area_(std::move(drivable_area)) {
  std::sort(segments_.begin(), segments_.end(),
            [](const LaneSegment& a, const LaneSegment& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    segments_[i].direction = (segments_[i].end - segments_[i].start).normalized();
    index_by_id_[segments_[i].id] = i;
  }
  for (auto& [id, succ] : successors_) std::sort(succ.begin(), succ.end());
  validate();
}

const LaneSegment& LaneGraph::segment(int id) const {
  auto it = index_by_id_.find(id);
  if (it == index_by_id_.end())
    throw Error(err::kValidate, "unknown segment id " + std::to_string(id));
  return segments_[it->second];
}

const std::vector<int>& LaneGraph::successors(int id) const {
  auto it = successors_.find(id);
  return it == successors_.end() ? kNoSuccessors : it->second;
}

std::pair<int, double> LaneGraph::nearest_segment(const Vec2& point) const {
  if (segments_.empty()) throw Error(err::kEmptyMap, "nearest_segment on empty map");
  int best_id = segments_.front().id;
  double best = std::numeric_limits<double>::infinity();
  for (const LaneSegment& seg : segments_) {  // ascending id
    const double d = point_segment_distance(seg.start, seg.end, point);
    if (d < best - 1e-12) {
      best = d;
      best_id = seg.id;
    }
  }
  return {best_id, best};
}

bool LaneGraph::contains_point(const Vec2& point) const {
  for (const auto& poly : drivable_area_)
    if (point_in_polygon(poly, point)) return true;
  return false;
}

void LaneGraph::validate() const {
  if (index_by_id_.size() != segments_.size())
    throw Error(err::kValidate, "duplicate segment ids in map");
  for (const LaneSegment& seg : segments_) {
    if (!(seg.length() > 0.0))
      throw Error(err::kValidate,
                  "segment " + std::to_string(seg.id) + " has zero length");
    if (std::abs(seg.direction.norm() - 1.0) > 1e-9)
      throw Error(err::kValidate,
                  "segment " + std::to_string(seg.id) + " direction not unit");
  }
  for (const auto& [id, succ] : successors_) {
    auto it = index_by_id_.find(id);
    if (it == index_by_id_.end())
      throw Error(err::kValidate,
                  "successor map references unknown segment " + std::to_string(id));
    const LaneSegment& pred = segments_[it->second];
    for (int sid : succ) {
      auto sit = index_by_id_.find(sid);
      if (sit == index_by_id_.end())
        throw Error(err::kValidate, "segment " + std::to_string(id) +
                                        " lists dangling successor " +
                                        std::to_string(sid));
      const LaneSegment& next = segments_[sit->second];
      if ((next.start - pred.end).norm() > kSuccessorGapTolerance)
        throw Error(err::kValidate, "successor " + std::to_string(sid) +
                                        " starts more than 0.5 m from end of segment " +
                                        std::to_string(id));
    }
  }
  for (std::size_t i = 0; i < drivable_area_.size(); ++i) {
    if (drivable_area_[i].size() < 3)
      throw Error(err::kValidate,
                  "drivable polygon " + std::to_string(i) + " has fewer than 3 vertices");
    if (!polygon_is_simple(drivable_area_[i]))
      throw Error(err::kValidate,
                  "drivable polygon " + std::to_string(i) + " is self-intersecting");
  }
}

const AgentTrack& Scene::agent(int id) const {
  for (const AgentTrack& a : agents)
    if (a.id == id) return a;
  throw Error(err::kValidate, "agent " + std::to_string(id) + " not present in scene");
}

namespace {

Vec2 parse_point(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(err::kValidate, std::string("expected [x,y] point in ") + where);
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> parse_point_list(const json& j, const char* where) {
  std::vector<Vec2> out;
  if (!j.is_array()) throw Error(err::kValidate, std::string("expected array in ") + where);
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(parse_point(p, where));
  return out;
}

Scene scene_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("map") || !doc.contains("agents") ||
      !doc.contains("focal_agent_id"))
    throw Error(err::kValidate, "scenario missing map/agents/focal_agent_id");

  const json& map = doc.at("map");
  std::vector<LaneSegment> segments;
  for (const auto& js : map.at("segments")) {
    LaneSegment seg;
    seg.id = js.at("id").get<int>();
    seg.start = parse_point(js.at("start"), "segment start");
    seg.end = parse_point(js.at("end"), "segment end");
    segments.push_back(seg);
  }

  std::map<int, std::vector<int>> successors;
  if (map.contains("successors")) {
    for (const auto& [key, val] : map.at("successors").items()) {
      int id = 0;
      try {
        id = std::stoi(key);
      } catch (const std::exception&) {
        throw Error(err::kValidate, "non-integer successor key '" + key + "'");
      }
      successors[id] = val.get<std::vector<int>>();
    }
  }

  std::vector<std::vector<Vec2>> polygons;
  if (map.contains("drivable_area"))
    for (const auto& jp : map.at("drivable_area"))
      polygons.push_back(parse_point_list(jp, "drivable_area"));

  Scene scene;
  scene.map = LaneGraph(std::move(segments), std::move(successors), std::move(polygons));
  scene.dt = doc.value("dt", 0.1);
  scene.focal_agent_id = doc.at("focal_agent_id").get<int>();

  for (const auto& ja : doc.at("agents")) {
    AgentTrack track;
    track.id = ja.at("id").get<int>();
    track.history = parse_point_list(ja.at("history"), "agent history");
    if (ja.contains("future") && !ja.at("future").is_null())
      track.future = parse_point_list(ja.at("future"), "agent future");
    scene.agents.push_back(std::move(track));
  }

  bool focal_found = false;
  for (const auto& a : scene.agents) focal_found |= (a.id == scene.focal_agent_id);
  if (!focal_found)
    throw Error(err::kValidate, "focal_agent_id " + std::to_string(scene.focal_agent_id) +
                                    " not present in agents");
  return scene;
}

}  // namespace

Scene load_scene(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(err::kParse,
                "malformed scenario JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return scene_from_json(doc);
}

Scene load_scene(const std::string& text) {
  std::istringstream in(text);
  return load_scene(in);
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(err::kIo, "cannot open scenario file " + path);
  return load_scene(in);
}

std::string scene_to_json(const Scene& scene) {
  json doc;
  json segments = json::array();
  for (const LaneSegment& seg : scene.map.segments()) {
    segments.push_back({{"id", seg.id},
                        {"start", {seg.start.x, seg.start.y}},
                        {"end", {seg.end.x, seg.end.y}}});
  }
  json successors = json::object();
  for (const LaneSegment& seg : scene.map.segments()) {
    const auto& succ = scene.map.successors(seg.id);
    if (!succ.empty()) successors[std::to_string(seg.id)] = succ;
  }
  json polygons = json::array();
  for (const auto& poly : scene.map.drivable_area()) {
    json jp = json::array();
    for (const Vec2& p : poly) jp.push_back({p.x, p.y});
    polygons.push_back(jp);
  }
  doc["map"] = {{"segments", segments},
                {"successors", successors},
                {"drivable_area", polygons}};

  json agents = json::array();
  for (const AgentTrack& a : scene.agents) {
    json ja;
    ja["id"] = a.id;
    json hist = json::array();
    for (const Vec2& p : a.history) hist.push_back({p.x, p.y});
    ja["history"] = hist;
    if (a.future) {
      json fut = json::array();
      for (const Vec2& p : *a.future) fut.push_back({p.x, p.y});
      ja["future"] = fut;
    } else {
      ja["future"] = nullptr;
    }
    agents.push_back(ja);
  }
  doc["agents"] = agents;
  doc["focal_agent_id"] = scene.focal_agent_id;
  doc["dt"] = scene.dt;
  return doc.dump();
}

void save_scene_file(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(err::kIo, "cannot write scenario file " + path);
  out << scene_to_json(scene) << "\n";
}

}  // namespace pbp
