#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pbp/mlp.hpp"

namespace pbp {

enum class DecoderKind {
  kPbp,                   // path classification + Frenet-frame regression
  kPbpCartesian,          // path classification + Cartesian-frame regression
  kGoalBased,             // endpoint classification + goal-conditioned regression
  kMultimodalRegression,  // winner-takes-all multimodal head only
};

std::string decoder_kind_name(DecoderKind kind);
DecoderKind decoder_kind_from_name(const std::string& name);

struct ModelConfig {
  int agent_dim = 48;
  int path_dim = 16;
  int agent_path_dim = 16;
  int goal_dim = 16;
  int hidden = 64;
  int history_steps = 20;  // T'
  int horizon_steps = 30;  // T
  int num_modes = 6;       // K
  double dt = 0.1;
};

// All trainable heads for one decoder variant. Heads not used by the variant
// stay empty and are neither initialized, trained, nor serialized.
struct ModelParams {
  ModelConfig config;
  DecoderKind decoder = DecoderKind::kPbp;

  Mlp path_encoder;         // path raw -> path_dim
  Mlp agent_path_encoder;   // agent-path raw -> agent_path_dim
  Mlp path_classifier;      // agent + path + agent-path -> 1 logit
  Mlp frenet_regressor;     // agent + path + Frenet history -> 2T
  Mlp cartesian_regressor;  // agent + path + Cartesian history -> 2T
  Mlp goal_encoder;         // goal raw -> goal_dim
  Mlp goal_classifier;      // agent + goal -> 1 logit
  Mlp goal_regressor;       // agent + goal + Cartesian history -> 2T
  Mlp path_free_regressor;  // agent -> K*2T coordinates + K mode logits
  Mlp selector;             // agent -> 1 logit (path-free probability)

  // Heads used by this decoder kind, in a fixed order shared by the
  // initializer, the optimizer, and the checkpoint format.
  std::vector<std::pair<std::string, Mlp*>> active_heads();
  std::vector<std::pair<std::string, const Mlp*>> active_heads() const;

  std::size_t total_params() const;
};

// Builds a variant with all head shapes derived from the config and weights
// drawn from the seeded RNG (biases zero).
ModelParams make_model(const ModelConfig& config, DecoderKind kind, std::uint64_t seed);

// Same shapes, all parameters zero. Used by tests of the zero-weight contracts.
ModelParams make_zero_model(const ModelConfig& config, DecoderKind kind);

// Checkpoint JSON: format-version field, config, and per-head layer sizes
// plus flat weight arrays. Serialization round-trips bit-exactly.
std::string model_to_json(const ModelParams& params);
ModelParams model_from_json(const std::string& text);
void save_model_file(const ModelParams& params, const std::string& path);
ModelParams load_model_file(const std::string& path);

}  // namespace pbp
