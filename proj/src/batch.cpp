#include "pbp/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pbp/error.hpp"

namespace pbp {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace

std::vector<PredictionSet> predict_scenes_serial(const ModelParams& params,
                                                 const std::vector<Scene>& scenes,
                                                 const PredictConfig& config) {
  std::vector<PredictionSet> out(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i)
    out[i] = predict(params, scenes[i], scenes[i].focal_agent_id, config);
  return out;
}

std::vector<PredictionSet> predict_scenes_parallel(const ModelParams& params,
                                                   const std::vector<Scene>& scenes,
                                                   const PredictConfig& config, int threads) {
  std::vector<PredictionSet> out(scenes.size());
  const int n_threads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#endif
  for (std::size_t i = 0; i < scenes.size(); ++i)
    out[i] = predict(params, scenes[i], scenes[i].focal_agent_id, config);
  (void)n_threads;
  return out;
}

std::vector<PredictionSet> predict_scenes(const ModelParams& params,
                                          const std::vector<Scene>& scenes,
                                          const PredictConfig& config,
                                          const BatchOptions& options) {
  return options.mode == ExecMode::kSerial
             ? predict_scenes_serial(params, scenes, config)
             : predict_scenes_parallel(params, scenes, config, options.threads);
}

std::vector<TrainingSample> preprocess_scenes_serial(const std::vector<Scene>& scenes,
                                                     const ModelConfig& config,
                                                     const SamplerParams& sampler) {
  std::vector<TrainingSample> out(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i)
    out[i] = preprocess_scene(scenes[i], config, sampler);
  return out;
}

std::vector<TrainingSample> preprocess_scenes_parallel(const std::vector<Scene>& scenes,
                                                       const ModelConfig& config,
                                                       const SamplerParams& sampler,
                                                       int threads) {
  std::vector<TrainingSample> out(scenes.size());
  const int n_threads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#endif
  for (std::size_t i = 0; i < scenes.size(); ++i)
    out[i] = preprocess_scene(scenes[i], config, sampler);
  (void)n_threads;
  return out;
}

std::vector<TrainingSample> preprocess_scenes(const std::vector<Scene>& scenes,
                                              const ModelConfig& config,
                                              const SamplerParams& sampler,
                                              const BatchOptions& options) {
  return options.mode == ExecMode::kSerial
             ? preprocess_scenes_serial(scenes, config, sampler)
             : preprocess_scenes_parallel(scenes, config, sampler, options.threads);
}

MetricsReport evaluate_scenes(const ModelParams& params, const std::vector<Scene>& scenes,
                              const PredictConfig& config, const BatchOptions& options) {
  const std::vector<PredictionSet> preds = predict_scenes(params, scenes, config, options);
  MetricsAccumulator acc;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const AgentTrack& focal = scenes[i].focal_agent();
    if (!focal.future) continue;
    acc.add(preds[i], *focal.future, scenes[i].map);
  }
  return acc.report();
}

}  // namespace pbp
