#include "doctest.h"
#include "pbp/error.hpp"
#include "pbp/lane_graph.hpp"
#include "pbp/scenario_gen.hpp"

namespace {

const char* kMinimalScenario = R"({
  "map": {"segments": [{"id": 0, "start": [0,0], "end": [4,0]}],
          "successors": {}, "drivable_area": []},
  "agents": [{"id": 7, "history": [[0,0],[1,0]], "future": null}],
  "focal_agent_id": 7,
  "dt": 0.1
})";

}  // namespace

TEST_CASE("load_scene: minimal one-segment scenario") {
  const pbp::Scene scene = pbp::load_scene(std::string(kMinimalScenario));
  CHECK(scene.map.segments().size() == 1);
  CHECK(scene.map.successors(0).empty());
  CHECK(scene.focal_agent_id == 7);
  CHECK(scene.dt == doctest::Approx(0.1));
  CHECK_FALSE(scene.focal_agent().future.has_value());
}

TEST_CASE("load_scene: dangling successor id is a validation error") {
  const std::string bad = R"({
    "map": {"segments": [{"id": 0, "start": [0,0], "end": [4,0]}],
            "successors": {"0": [999]}, "drivable_area": []},
    "agents": [{"id": 0, "history": [[0,0],[1,0]], "future": null}],
    "focal_agent_id": 0, "dt": 0.1
  })";
  CHECK_THROWS_WITH_AS(pbp::load_scene(bad), doctest::Contains("999"), pbp::Error);
}

TEST_CASE("load_scene: malformed JSON reports the byte offset") {
  try {
    pbp::load_scene(std::string("{\"map\": [,]}"));
    FAIL("expected a parse error");
  } catch (const pbp::Error& e) {
    CHECK(e.code() == std::string(pbp::err::kParse));
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("load_scene: successor gap over 0.5 m rejected, under accepted") {
  const auto scenario = [](double gap) {
    return std::string(R"({"map": {"segments": [
        {"id": 0, "start": [0,0], "end": [4,0]},
        {"id": 1, "start": [)") +
           std::to_string(4.0 + gap) + R"(,0], "end": [8,0]}],
        "successors": {"0": [1]}, "drivable_area": []},
        "agents": [{"id": 0, "history": [[0,0],[1,0]], "future": null}],
        "focal_agent_id": 0, "dt": 0.1})";
  };
  CHECK_NOTHROW(pbp::load_scene(scenario(0.4)));
  CHECK_THROWS_AS(pbp::load_scene(scenario(0.6)), pbp::Error);
}

TEST_CASE("load_scene: missing focal agent and bad polygons rejected") {
  const std::string no_focal = R"({
    "map": {"segments": [{"id": 0, "start": [0,0], "end": [4,0]}],
            "successors": {}, "drivable_area": []},
    "agents": [{"id": 1, "history": [[0,0],[1,0]], "future": null}],
    "focal_agent_id": 2, "dt": 0.1})";
  CHECK_THROWS_AS(pbp::load_scene(no_focal), pbp::Error);

  const std::string bowtie = R"({
    "map": {"segments": [{"id": 0, "start": [0,0], "end": [4,0]}], "successors": {},
            "drivable_area": [[[0,0],[4,4],[4,0],[0,4]]]},
    "agents": [{"id": 0, "history": [[0,0],[1,0]], "future": null}],
    "focal_agent_id": 0, "dt": 0.1})";
  CHECK_THROWS_WITH_AS(pbp::load_scene(bowtie), doctest::Contains("self-intersecting"),
                       pbp::Error);
}

TEST_CASE("generated 3-lane highway has lanes x segments-per-lane segments") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kStraight;
  config.n_scenes = 2;
  config.seed = 21;
  const auto scenes = pbp::generate(config);
  // Straight layout: 3 lanes of 120 m at 3 m chords.
  for (const pbp::Scene& scene : scenes) CHECK(scene.map.segments().size() == 3 * 40);
}

TEST_CASE("scene serialize/parse roundtrip is structurally identical") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kFork;
  config.n_scenes = 1;
  config.seed = 5;
  config.path_free_fraction = 0.0;
  const pbp::Scene scene = pbp::generate(config)[0];

  const std::string once = pbp::scene_to_json(scene);
  const pbp::Scene reloaded = pbp::load_scene(once);
  const std::string twice = pbp::scene_to_json(reloaded);
  CHECK(once == twice);  // validation is idempotent, serialization is stable
  CHECK(reloaded.map.segments().size() == scene.map.segments().size());
  CHECK(reloaded.agents.size() == scene.agents.size());
}
