#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pbp/dataset.hpp"
#include "pbp/error.hpp"
#include "pbp/scenario_gen.hpp"

namespace fs = std::filesystem;

TEST_CASE("generate: fixed seed reproduces byte-identical scenario files") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kMerge;
  config.n_scenes = 4;
  config.seed = 77;
  config.path_free_fraction = 0.25;

  const auto a = pbp::generate(config);
  const auto b = pbp::generate(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(pbp::scene_to_json(a[i]) == pbp::scene_to_json(b[i]));
}

TEST_CASE("generate: zero lateral noise puts futures exactly on centerlines") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kStraight;
  config.n_scenes = 3;
  config.seed = 15;
  config.lateral_noise_sigma = 0.0;
  for (const pbp::Scene& scene : pbp::generate(config)) {
    for (const pbp::Vec2& p : *scene.focal_agent().future)
      CHECK(scene.map.nearest_segment(p).second <= 1e-9);
  }
}

TEST_CASE("generate: path-free labelling counts are exact") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kStraight;
  config.n_scenes = 40;
  config.seed = 29;
  config.path_free_fraction = 0.2;
  const auto scenes = pbp::generate(config);

  int labelled = 0;
  for (const pbp::Scene& scene : scenes) {
    const auto sample = pbp::preprocess_scene(scene, pbp::ModelConfig{}, pbp::SamplerParams{});
    labelled += sample.is_path_free ? 1 : 0;
  }
  CHECK(labelled == 8);  // 0.2 * 40 exactly, under the 5 m rule
}

TEST_CASE("generate: on-path agents stay on-path for sigma below 1 m") {
  for (const auto layout : {pbp::Layout::kCurve, pbp::Layout::kFork, pbp::Layout::kGrid,
                            pbp::Layout::kLaneChange}) {
    pbp::GenConfig config;
    config.layout = layout;
    config.n_scenes = 6;
    config.seed = 91;
    config.lateral_noise_sigma = 0.3;
    for (const pbp::Scene& scene : pbp::generate(config)) {
      const auto sample =
          pbp::preprocess_scene(scene, pbp::ModelConfig{}, pbp::SamplerParams{});
      CHECK_FALSE(sample.is_path_free);
      CHECK(sample.candidates.gt_index.has_value());
    }
  }
}

TEST_CASE("generate: scenes survive a serialize/parse roundtrip with validation") {
  for (const auto layout : {pbp::Layout::kStraight, pbp::Layout::kCurve, pbp::Layout::kFork,
                            pbp::Layout::kMerge, pbp::Layout::kGrid,
                            pbp::Layout::kLaneChange}) {
    pbp::GenConfig config;
    config.layout = layout;
    config.n_scenes = 2;
    config.seed = 55;
    config.path_free_fraction = 0.5;
    for (const pbp::Scene& scene : pbp::generate(config)) {
      const pbp::Scene reloaded = pbp::load_scene(pbp::scene_to_json(scene));
      CHECK(reloaded.map.segments().size() == scene.map.segments().size());
      CHECK(pbp::scene_to_json(reloaded) == pbp::scene_to_json(scene));
    }
  }
}

TEST_CASE("generate: config validation") {
  pbp::GenConfig config;
  config.n_scenes = 0;
  CHECK_THROWS_AS(pbp::generate(config), pbp::Error);
  config.n_scenes = 1;
  config.speed_min = 9.0;
  config.speed_max = 3.0;
  CHECK_THROWS_AS(pbp::generate(config), pbp::Error);
  CHECK_THROWS_AS(pbp::layout_from_name("zigzag"), pbp::Error);
  CHECK(pbp::layout_from_name("lane_change") == pbp::Layout::kLaneChange);
}

TEST_CASE("split: seeded shuffle, disjoint and exhaustive") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kStraight;
  config.n_scenes = 10;
  config.seed = 8;
  const auto scenes = pbp::generate(config);

  auto [train, val] = pbp::split(std::vector<pbp::Scene>(scenes), 0.8, 123);
  CHECK(train.size() == 8);
  CHECK(val.size() == 2);

  // Union equals the original multiset of scenes (compare serialized forms).
  std::vector<std::string> everything;
  for (const auto& s : train) everything.push_back(pbp::scene_to_json(s));
  for (const auto& s : val) everything.push_back(pbp::scene_to_json(s));
  std::vector<std::string> original;
  for (const auto& s : scenes) original.push_back(pbp::scene_to_json(s));
  std::sort(everything.begin(), everything.end());
  std::sort(original.begin(), original.end());
  CHECK(everything == original);

  // Same seed, same split.
  auto [train2, val2] = pbp::split(std::vector<pbp::Scene>(scenes), 0.8, 123);
  REQUIRE(train2.size() == train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    CHECK(pbp::scene_to_json(train2[i]) == pbp::scene_to_json(train[i]));

  CHECK_THROWS_AS(pbp::split(std::vector<pbp::Scene>(scenes), 1.5, 1), pbp::Error);
}

TEST_CASE("write_scenes emits zero-padded indexed files loadable from disk") {
  pbp::GenConfig config;
  config.layout = pbp::Layout::kCurve;
  config.n_scenes = 3;
  config.seed = 2;
  const auto scenes = pbp::generate(config);

  const fs::path dir = fs::temp_directory_path() / "pbp_gen_test";
  fs::remove_all(dir);
  pbp::write_scenes(scenes, dir.string());
  CHECK(fs::exists(dir / "scene_000000.json"));
  CHECK(fs::exists(dir / "scene_000002.json"));
  const auto loaded = pbp::load_scenes(dir.string());
  CHECK(loaded.size() == 3);
  CHECK(pbp::scene_to_json(loaded[1]) == pbp::scene_to_json(scenes[1]));
  fs::remove_all(dir);
}
