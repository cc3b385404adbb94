#pragma once

#include <vector>

#include "pbp/dataset.hpp"
#include "pbp/metrics.hpp"
#include "pbp/model.hpp"
#include "pbp/predictor.hpp"

namespace pbp {

// Scene-level work (prediction, preprocessing, evaluation) is embarrassingly
// parallel. The parallel kernels write per-scene slots and reduce in scene
// order, so serial and parallel paths produce identical bytes; the serial
// reference stays around as the comparison baseline for tests and the
// benchmark.
enum class ExecMode { kSerial, kParallel };

struct BatchOptions {
  ExecMode mode = ExecMode::kParallel;
  int threads = 0;  // 0 = all cores
};

std::vector<PredictionSet> predict_scenes_serial(const ModelParams& params,
                                                 const std::vector<Scene>& scenes,
                                                 const PredictConfig& config);
std::vector<PredictionSet> predict_scenes_parallel(const ModelParams& params,
                                                   const std::vector<Scene>& scenes,
                                                   const PredictConfig& config, int threads);
std::vector<PredictionSet> predict_scenes(const ModelParams& params,
                                          const std::vector<Scene>& scenes,
                                          const PredictConfig& config,
                                          const BatchOptions& options);

std::vector<TrainingSample> preprocess_scenes_serial(const std::vector<Scene>& scenes,
                                                     const ModelConfig& config,
                                                     const SamplerParams& sampler);
std::vector<TrainingSample> preprocess_scenes_parallel(const std::vector<Scene>& scenes,
                                                       const ModelConfig& config,
                                                       const SamplerParams& sampler,
                                                       int threads);
std::vector<TrainingSample> preprocess_scenes(const std::vector<Scene>& scenes,
                                              const ModelConfig& config,
                                              const SamplerParams& sampler,
                                              const BatchOptions& options);

// Predicts the focal agent of every scene with a ground-truth future and
// aggregates metrics in scene order.
MetricsReport evaluate_scenes(const ModelParams& params, const std::vector<Scene>& scenes,
                              const PredictConfig& config, const BatchOptions& options);

}  // namespace pbp
