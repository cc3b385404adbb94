#include "pbp/model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pbp/error.hpp"
#include "pbp/features.hpp"

namespace pbp {

using nlohmann::json;

namespace {
constexpr int kCheckpointVersion = 1;
}

std::string decoder_kind_name(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kPbp:
      return "pbp";
    case DecoderKind::kPbpCartesian:
      return "pbp_cartesian";
    case DecoderKind::kGoalBased:
      return "goal_based";
    case DecoderKind::kMultimodalRegression:
      return "multimodal_regression";
  }
  throw Error(err::kConfig, "unknown decoder kind");
}

DecoderKind decoder_kind_from_name(const std::string& name) {
  if (name == "pbp") return DecoderKind::kPbp;
  if (name == "pbp_cartesian") return DecoderKind::kPbpCartesian;
  if (name == "goal_based") return DecoderKind::kGoalBased;
  if (name == "multimodal_regression") return DecoderKind::kMultimodalRegression;
  throw Error(err::kConfig, "unknown decoder '" + name + "'");
}

std::vector<std::pair<std::string, Mlp*>> ModelParams::active_heads() {
  switch (decoder) {
    case DecoderKind::kPbp:
      return {{"path_encoder", &path_encoder},
              {"agent_path_encoder", &agent_path_encoder},
              {"path_classifier", &path_classifier},
              {"frenet_regressor", &frenet_regressor},
              {"path_free_regressor", &path_free_regressor},
              {"selector", &selector}};
    case DecoderKind::kPbpCartesian:
      return {{"path_encoder", &path_encoder},
              {"agent_path_encoder", &agent_path_encoder},
              {"path_classifier", &path_classifier},
              {"cartesian_regressor", &cartesian_regressor},
              {"path_free_regressor", &path_free_regressor},
              {"selector", &selector}};
    case DecoderKind::kGoalBased:
      return {{"goal_encoder", &goal_encoder},
              {"goal_classifier", &goal_classifier},
              {"goal_regressor", &goal_regressor},
              {"path_free_regressor", &path_free_regressor},
              {"selector", &selector}};
    case DecoderKind::kMultimodalRegression:
      return {{"path_free_regressor", &path_free_regressor}};
  }
  throw Error(err::kConfig, "unknown decoder kind");
}

std::vector<std::pair<std::string, const Mlp*>> ModelParams::active_heads() const {
  auto mutable_heads = const_cast<ModelParams*>(this)->active_heads();
  std::vector<std::pair<std::string, const Mlp*>> out;
  out.reserve(mutable_heads.size());
  for (auto& [name, head] : mutable_heads) out.emplace_back(name, head);
  return out;
}

std::size_t ModelParams::total_params() const {
  std::size_t n = 0;
  for (const auto& [name, head] : active_heads()) n += head->params.size();
  return n;
}

namespace {

void shape_heads(ModelParams& m) {
  const ModelConfig& c = m.config;
  const int h = c.hidden;
  const int t2 = 2 * c.horizon_steps;
  const int hist2 = 2 * c.history_steps;
  m.path_encoder = Mlp({kPathRawDim, h, h, c.path_dim});
  m.agent_path_encoder = Mlp({kAgentPathRawDim, h, h, c.agent_path_dim});
  m.path_classifier = Mlp({c.agent_dim + c.path_dim + c.agent_path_dim, h, h, 1});
  m.frenet_regressor = Mlp({c.agent_dim + c.path_dim + hist2, h, h, t2});
  m.cartesian_regressor = Mlp({c.agent_dim + c.path_dim + hist2, h, h, t2});
  m.goal_encoder = Mlp({kGoalRawDim, h, h, c.goal_dim});
  m.goal_classifier = Mlp({c.agent_dim + c.goal_dim, h, h, 1});
  m.goal_regressor = Mlp({c.agent_dim + c.goal_dim + hist2, h, h, t2});
  m.path_free_regressor = Mlp({c.agent_dim, h, h, c.num_modes * t2 + c.num_modes});
  m.selector = Mlp({c.agent_dim, h, h, 1});
}

}  // namespace

ModelParams make_model(const ModelConfig& config, DecoderKind kind, std::uint64_t seed) {
  if (config.agent_dim < 2 * (config.history_steps - 1) + 3)
    throw Error(err::kConfig, "agent_dim too small for the configured history length");
  ModelParams m;
  m.config = config;
  m.decoder = kind;
  shape_heads(m);
  std::mt19937_64 rng(seed);
  for (auto& [name, head] : m.active_heads()) head->init(rng);
  return m;
}

ModelParams make_zero_model(const ModelConfig& config, DecoderKind kind) {
  ModelParams m;
  m.config = config;
  m.decoder = kind;
  shape_heads(m);
  return m;
}

std::string model_to_json(const ModelParams& params) {
  json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["decoder"] = decoder_kind_name(params.decoder);
  doc["config"] = {{"agent_dim", params.config.agent_dim},
                   {"path_dim", params.config.path_dim},
                   {"agent_path_dim", params.config.agent_path_dim},
                   {"goal_dim", params.config.goal_dim},
                   {"hidden", params.config.hidden},
                   {"history_steps", params.config.history_steps},
                   {"horizon_steps", params.config.horizon_steps},
                   {"num_modes", params.config.num_modes},
                   {"dt", params.config.dt}};
  json heads = json::object();
  for (const auto& [name, head] : params.active_heads()) {
    heads[name] = {{"sizes", head->sizes}, {"params", head->params}};
  }
  doc["heads"] = heads;
  return doc.dump();
}

ModelParams model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(err::kParse,
                "malformed checkpoint JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.contains("format_version") || doc["format_version"].get<int>() != kCheckpointVersion)
    throw Error(err::kVersion, "unsupported checkpoint format_version (expected " +
                                   std::to_string(kCheckpointVersion) + ")");

  ModelParams m;
  const json& jc = doc.at("config");
  m.config.agent_dim = jc.at("agent_dim").get<int>();
  m.config.path_dim = jc.at("path_dim").get<int>();
  m.config.agent_path_dim = jc.at("agent_path_dim").get<int>();
  m.config.goal_dim = jc.at("goal_dim").get<int>();
  m.config.hidden = jc.at("hidden").get<int>();
  m.config.history_steps = jc.at("history_steps").get<int>();
  m.config.horizon_steps = jc.at("horizon_steps").get<int>();
  m.config.num_modes = jc.at("num_modes").get<int>();
  m.config.dt = jc.at("dt").get<double>();
  m.decoder = decoder_kind_from_name(doc.at("decoder").get<std::string>());
  shape_heads(m);

  const json& heads = doc.at("heads");
  for (auto& [name, head] : m.active_heads()) {
    if (!heads.contains(name))
      throw Error(err::kValidate, "checkpoint missing head '" + name + "'");
    const json& jh = heads.at(name);
    const auto sizes = jh.at("sizes").get<std::vector<int>>();
    if (sizes != head->sizes)
      throw Error(err::kValidate, "checkpoint head '" + name + "' has unexpected layer sizes");
    head->params = jh.at("params").get<std::vector<double>>();
    if (head->params.size() != Mlp::param_count(sizes))
      throw Error(err::kValidate, "checkpoint head '" + name + "' has wrong parameter count");
    for (double v : head->params)
      if (!std::isfinite(v))
        throw Error(err::kValidate, "checkpoint head '" + name + "' contains non-finite values");
  }
  return m;
}

void save_model_file(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(err::kIo, "cannot write checkpoint " + path);
  out << model_to_json(params) << "\n";
}

ModelParams load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(err::kIo, "cannot open checkpoint " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace pbp
