#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pbp/batch.hpp"
#include "pbp/trainer.hpp"

namespace pbp {

struct AblationConfig {
  std::vector<DecoderKind> decoders;  // must be nonempty
  ModelConfig model;
  TrainConfig train;
  PredictConfig predict;
  double train_fraction = 0.8;
};

struct AblationRow {
  DecoderKind decoder;
  MetricsReport metrics;
  ModelParams params;
};

// Trains every requested decoder on the identical train split / seed and
// evaluates on the shared validation split. Progress lines go to `log` when
// provided.
std::vector<AblationRow> run_ablation(const std::vector<Scene>& scenes,
                                      const AblationConfig& config,
                                      const BatchOptions& options,
                                      std::ostream* log = nullptr);

// CSV rows mirroring the decoder-comparison table columns:
// decoder,minFDE_1,MR_1,minFDE_6,MR_6,offroad_rate,lane_dev
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace pbp
