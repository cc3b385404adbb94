#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbp/dataset.hpp"
#include "pbp/model.hpp"

namespace pbp {

struct TrainConfig {
  double lambda_lateral = 1.0;
  double lambda_cls = 1.0;
  double learning_rate = 5e-4;
  double weight_decay = 1e-4;
  int epochs = 64;
  int batch_size = 4;
  std::uint64_t seed = 7;
  // Batch loss evaluation fans out across agents; the reduction order is
  // fixed, so the result is identical for any thread count. 0 = all cores.
  int threads = 0;
};

struct LossReport {
  double cls_loss = 0.0;
  double reg_loss_s = 0.0;
  double reg_loss_d = 0.0;
  double selector_loss = 0.0;
  double path_free_loss = 0.0;
  double total = 0.0;
};

// Standard smooth L1 with the transition at |x - y| = 1.
double smooth_l1(double x, double y);

// Sum over steps of smooth-L1 on s plus lambda_lateral times smooth-L1 on d.
double regression_loss(const FrenetTrajectory& pred, const FrenetTrajectory& gt,
                       double lambda_lateral);

// Per-head gradient buffers aligned with ModelParams::active_heads().
struct GradientSet {
  std::vector<std::vector<double>> by_head;

  void resize_like(const ModelParams& params);
  void set_zero();
  void add(const GradientSet& other);
};

// Batch loss under the decoder kind of `params`. Classification and
// regression terms are teacher-forced on the ground-truth path and averaged
// over on-path agents; the selector term covers every labeled agent; the
// winner-takes-all term covers path-free agents (all agents for the
// multimodal-regression variant). Agents without a future are skipped and
// counted. When `grads` is non-null accumulates d(total)/d(params).
LossReport total_loss(std::span<const TrainingSample* const> batch,
                      const ModelParams& params, const TrainConfig& config,
                      GradientSet* grads = nullptr, int* skipped = nullptr);

struct TrainResult {
  ModelParams params;
  std::vector<LossReport> history;  // one entry per epoch
  int skipped_agents = 0;
};

// Adam with decoupled weight decay over seeded shuffled batches.
// Deterministic: a fixed seed yields bitwise-identical parameters.
TrainResult train(const std::vector<TrainingSample>& dataset, const ModelConfig& config,
                  DecoderKind kind, const TrainConfig& train_config);

// Per-epoch CSV: epoch,cls,reg_s,reg_d,selector,path_free,total
void write_loss_csv(const std::vector<LossReport>& history, const std::string& path);

}  // namespace pbp
