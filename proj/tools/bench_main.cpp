// Benchmark comparing the serial reference implementations against the
// OpenMP kernels for scene preprocessing and batch prediction, verifying on
// the way that both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "pbp/batch.hpp"
#include "pbp/error.hpp"
#include "pbp/scenario_gen.hpp"
#include "pbp/trainer.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool same_predictions(const std::vector<pbp::PredictionSet>& a,
                      const std::vector<pbp::PredictionSet>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].probabilities != b[i].probabilities) return false;
    if (a[i].trajectories.size() != b[i].trajectories.size()) return false;
    for (std::size_t m = 0; m < a[i].trajectories.size(); ++m)
      for (std::size_t t = 0; t < a[i].trajectories[m].size(); ++t) {
        if (a[i].trajectories[m][t].x != b[i].trajectories[m][t].x) return false;
        if (a[i].trajectories[m][t].y != b[i].trajectories[m][t].y) return false;
      }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP benchmark for scene preprocessing and prediction"};
  int n_scenes = 120;
  int reps = 3;
  int threads = 0;
  std::uint64_t seed = 11;
  app.add_option("--scenes", n_scenes, "scenes per layout batch");
  app.add_option("--reps", reps, "repetitions (best time reported)");
  app.add_option("--threads", threads, "parallel thread count (0 = all cores)");
  app.add_option("--seed", seed, "scene seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<pbp::Scene> scenes;
    const pbp::Layout layouts[] = {pbp::Layout::kCurve, pbp::Layout::kFork,
                                   pbp::Layout::kGrid, pbp::Layout::kLaneChange};
    for (int i = 0; i < 4; ++i) {
      pbp::GenConfig gen;
      gen.layout = layouts[i];
      gen.n_scenes = n_scenes / 4 + (i < n_scenes % 4 ? 1 : 0);
      gen.seed = seed + 97ULL * i;
      for (auto& s : pbp::generate(gen)) scenes.push_back(std::move(s));
    }

    pbp::ModelConfig model_config;
    pbp::SamplerParams sampler;
    pbp::PredictConfig predict_config;
    const pbp::ModelParams params = pbp::make_model(model_config, pbp::DecoderKind::kPbp, seed);

    std::vector<pbp::TrainingSample> pre_serial, pre_parallel;
    const double t_pre_serial = time_ms(
        [&] { pre_serial = pbp::preprocess_scenes_serial(scenes, model_config, sampler); },
        reps);
    const double t_pre_parallel = time_ms(
        [&] {
          pre_parallel =
              pbp::preprocess_scenes_parallel(scenes, model_config, sampler, threads);
        },
        reps);

    std::vector<pbp::PredictionSet> pred_serial, pred_parallel;
    const double t_pred_serial = time_ms(
        [&] { pred_serial = pbp::predict_scenes_serial(params, scenes, predict_config); },
        reps);
    const double t_pred_parallel = time_ms(
        [&] {
          pred_parallel =
              pbp::predict_scenes_parallel(params, scenes, predict_config, threads);
        },
        reps);

    bool identical = same_predictions(pred_serial, pred_parallel);
    identical = identical && pre_serial.size() == pre_parallel.size();
    for (std::size_t i = 0; identical && i < pre_serial.size(); ++i)
      identical = pre_serial[i].agent_feature == pre_parallel[i].agent_feature &&
                  pre_serial[i].candidates.paths.size() == pre_parallel[i].candidates.paths.size();

    std::printf("scenes: %zu, reps: %d\n", scenes.size(), reps);
    std::printf("%-22s %10s %10s %8s\n", "kernel", "serial", "openmp", "speedup");
    std::printf("%-22s %8.1fms %8.1fms %7.2fx\n", "preprocess_scenes", t_pre_serial,
                t_pre_parallel, t_pre_serial / t_pre_parallel);
    std::printf("%-22s %8.1fms %8.1fms %7.2fx\n", "predict_scenes", t_pred_serial,
                t_pred_parallel, t_pred_serial / t_pred_parallel);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
  } catch (const pbp::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 1;
  }
}
