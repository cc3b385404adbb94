#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pbp/ablation.hpp"
#include "pbp/error.hpp"
#include "pbp/scenario_gen.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<pbp::Scene> small_corpus(int n, std::uint64_t seed) {
  pbp::GenConfig gen;
  gen.layout = pbp::Layout::kFork;
  gen.n_scenes = n;
  gen.seed = seed;
  return pbp::generate(gen);
}

}  // namespace

TEST_CASE("run_ablation: single decoder gives a single row; empty set rejected") {
  pbp::AblationConfig config;
  config.decoders = {pbp::DecoderKind::kPbp};
  config.train.epochs = 1;
  config.train.seed = 3;
  const auto rows = pbp::run_ablation(small_corpus(10, 77), config, pbp::BatchOptions{});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].decoder == pbp::DecoderKind::kPbp);
  CHECK(rows[0].metrics.num_scenes == 2);  // 0.8 split of 10

  config.decoders.clear();
  CHECK_THROWS_AS(pbp::run_ablation(small_corpus(10, 77), config, pbp::BatchOptions{}),
                  pbp::Error);
}

TEST_CASE("ablation CSV column set matches the declared header exactly") {
  pbp::AblationConfig config;
  config.decoders = {pbp::DecoderKind::kPbp, pbp::DecoderKind::kMultimodalRegression};
  config.train.epochs = 1;
  config.train.seed = 5;
  const auto rows = pbp::run_ablation(small_corpus(10, 31), config, pbp::BatchOptions{});

  const fs::path path = fs::temp_directory_path() / "pbp_ablation_test.csv";
  pbp::write_ablation_csv(rows, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "decoder,minFDE_1,MR_1,minFDE_6,MR_6,offroad_rate,lane_dev");

  int data_rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++data_rows;
    std::stringstream ss(line);
    std::string field;
    int fields = 0;
    while (std::getline(ss, field, ',')) ++fields;
    CHECK(fields == 7);
  }
  CHECK(data_rows == 2);
  fs::remove(path);
}

TEST_CASE("prediction JSON roundtrip re-evaluates to identical metrics") {
  const auto scenes = small_corpus(3, 12);
  const auto params = pbp::make_model(pbp::ModelConfig{}, pbp::DecoderKind::kPbp, 2);
  for (const auto& scene : scenes) {
    const auto preds = pbp::predict(params, scene, scene.focal_agent_id, pbp::PredictConfig{});
    const auto [reloaded, agent_id] =
        pbp::prediction_from_json(pbp::prediction_to_json(preds, scene.focal_agent_id));
    CHECK(agent_id == scene.focal_agent_id);

    const auto& gt = *scene.focal_agent().future;
    CHECK(pbp::min_ade(reloaded, gt, 6) == pbp::min_ade(preds, gt, 6));
    CHECK(pbp::min_fde(reloaded, gt, 1) == pbp::min_fde(preds, gt, 1));
    CHECK(pbp::lane_deviation(reloaded, scene.map) == pbp::lane_deviation(preds, scene.map));
    CHECK(pbp::offroad_rate(reloaded, scene.map).overall ==
          pbp::offroad_rate(preds, scene.map).overall);
    CHECK(pbp::dac(reloaded, scene.map) == pbp::dac(preds, scene.map));
  }
}

TEST_CASE("grid layout yields candidate sets at the hundreds scale") {
  pbp::GenConfig gen;
  gen.layout = pbp::Layout::kGrid;
  gen.n_scenes = 12;
  gen.seed = 12;
  gen.speed_min = 8.0;
  gen.speed_max = 12.0;
  const auto scenes = pbp::generate(gen);
  const auto samples =
      pbp::preprocess_scenes_serial(scenes, pbp::ModelConfig{}, pbp::SamplerParams{});
  double mean = 0.0;
  for (const auto& s : samples) mean += static_cast<double>(s.candidates.paths.size());
  mean /= static_cast<double>(samples.size());
  // Within an order of magnitude of the ~600 candidate paths per agent the
  // dense urban setting is expected to produce.
  CHECK(mean >= 60.0);
  CHECK(mean <= 6000.0);
}
