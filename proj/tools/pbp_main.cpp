// pbp: command-line front end wiring the generator, trainer, predictor,
// evaluator, and decoder-ablation runner together.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbp/ablation.hpp"
#include "pbp/batch.hpp"
#include "pbp/error.hpp"
#include "pbp/scenario_gen.hpp"
#include "pbp/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliSettings {
  pbp::SamplerParams sampler;
  double nms_endpoint_radius_m = 2.0;
  pbp::ModelConfig model;
  pbp::TrainConfig train;
  pbp::GenConfig gen;
  double train_fraction = 0.8;
  int threads = 0;
  std::uint64_t seed = 7;
};

// Config file: flat JSON object mirroring the module parameter names.
void apply_config_file(CliSettings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pbp::Error(pbp::err::kIo, "cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw pbp::Error(pbp::err::kParse,
                     "malformed config JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const auto get = [&](const char* key, auto& target) {
    if (doc.contains(key)) target = doc.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("seed_radius_m", s.sampler.seed_radius_m);
  get("seed_max_angle_deg", s.sampler.seed_max_angle_deg);
  get("path_min_len_m", s.sampler.path_min_len_m);
  get("path_max_len_m", s.sampler.path_max_len_m);
  get("max_paths", s.sampler.max_paths);
  get("path_free_threshold_m", s.sampler.path_free_threshold_m);
  get("nms_endpoint_radius_m", s.nms_endpoint_radius_m);
  get("agent_dim", s.model.agent_dim);
  get("path_dim", s.model.path_dim);
  get("agent_path_dim", s.model.agent_path_dim);
  get("goal_dim", s.model.goal_dim);
  get("hidden", s.model.hidden);
  get("history_steps", s.model.history_steps);
  get("horizon_steps", s.model.horizon_steps);
  get("num_modes", s.model.num_modes);
  get("dt", s.model.dt);
  get("lambda_lateral", s.train.lambda_lateral);
  get("lambda_cls", s.train.lambda_cls);
  get("learning_rate", s.train.learning_rate);
  get("weight_decay", s.train.weight_decay);
  get("epochs", s.train.epochs);
  get("batch_size", s.train.batch_size);
  get("seed", s.seed);
  get("threads", s.threads);
  get("n_scenes", s.gen.n_scenes);
  get("speed_min", s.gen.speed_min);
  get("speed_max", s.gen.speed_max);
  get("lateral_noise_sigma", s.gen.lateral_noise_sigma);
  get("path_free_fraction", s.gen.path_free_fraction);
  get("train_fraction", s.train_fraction);
  if (doc.contains("layout"))
    s.gen.layout = pbp::layout_from_name(doc.at("layout").get<std::string>());
}

pbp::PredictConfig make_predict_config(const CliSettings& s) {
  pbp::PredictConfig config;
  config.sampler = s.sampler;
  config.nms_endpoint_radius_m = s.nms_endpoint_radius_m;
  return config;
}

pbp::BatchOptions make_batch_options(const CliSettings& s) {
  pbp::BatchOptions options;
  options.threads = s.threads;
  options.mode = pbp::ExecMode::kParallel;
  return options;
}

std::string sibling_path(const std::string& base, const std::string& suffix) {
  fs::path p(base);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

int cmd_generate(const CliSettings& settings, const std::string& layout_arg,
                 const std::string& out_dir) {
  pbp::GenConfig config = settings.gen;
  config.seed = settings.seed;
  config.history_steps = settings.model.history_steps;
  config.horizon_steps = settings.model.horizon_steps;
  config.dt = settings.model.dt;

  if (layout_arg == "mixed") {
    static const pbp::Layout kAll[] = {pbp::Layout::kStraight, pbp::Layout::kCurve,
                                       pbp::Layout::kFork,     pbp::Layout::kMerge,
                                       pbp::Layout::kGrid,     pbp::Layout::kLaneChange};
    int offset = 0;
    for (int li = 0; li < 6; ++li) {
      pbp::GenConfig part = config;
      part.layout = kAll[li];
      part.n_scenes = config.n_scenes / 6 + (li < config.n_scenes % 6 ? 1 : 0);
      part.seed = config.seed + 1000ULL * li;
      if (part.n_scenes == 0) continue;
      pbp::write_scenes(pbp::generate(part), out_dir, offset);
      offset += part.n_scenes;
    }
    std::cout << "wrote " << offset << " scenes to " << out_dir << "\n";
    return 0;
  }

  config.layout = pbp::layout_from_name(layout_arg);
  const auto scenes = pbp::generate(config);
  pbp::write_scenes(scenes, out_dir);
  std::cout << "wrote " << scenes.size() << " scenes to " << out_dir << "\n";
  return 0;
}

int cmd_train(const CliSettings& settings, const std::string& scenes_dir,
              const std::string& decoder, const std::string& out_path,
              std::string loss_csv) {
  pbp::TrainConfig train_config = settings.train;
  train_config.seed = settings.seed;
  train_config.threads = settings.threads;

  const auto scenes = pbp::load_scenes(scenes_dir);
  const auto samples = pbp::preprocess_scenes(scenes, settings.model, settings.sampler,
                                              make_batch_options(settings));
  std::cerr << "[train] " << samples.size() << " scenes preprocessed\n";

  pbp::TrainResult result = pbp::train(samples, settings.model,
                                       pbp::decoder_kind_from_name(decoder), train_config);
  if (result.skipped_agents > 0)
    std::cerr << "[train] warning: skipped " << result.skipped_agents
              << " agents without a ground-truth future\n";
  pbp::save_model_file(result.params, out_path);
  if (loss_csv.empty()) loss_csv = sibling_path(out_path, "_losses.csv");
  pbp::write_loss_csv(result.history, loss_csv);
  std::cerr << "[train] loss " << result.history.front().total << " -> "
            << result.history.back().total << " over " << result.history.size()
            << " epochs\n";
  std::cout << "wrote " << out_path << " and " << loss_csv << "\n";
  return 0;
}

int cmd_predict(const CliSettings& settings, const std::string& model_path,
                const std::string& scene_path, const std::string& out_path) {
  const pbp::ModelParams params = pbp::load_model_file(model_path);
  const pbp::Scene scene = pbp::load_scene_file(scene_path);
  const pbp::PredictionSet preds =
      pbp::predict(params, scene, scene.focal_agent_id, make_predict_config(settings));

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pbp::Error(pbp::err::kIo, "cannot write prediction " + out_path);
  out << pbp::prediction_to_json(preds, scene.focal_agent_id) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_eval(const CliSettings& settings, const std::string& model_path,
             const std::string& scenes_dir, const std::string& out_path,
             std::string offroad_csv, const std::string& svg_path) {
  const pbp::ModelParams params = pbp::load_model_file(model_path);
  const auto scenes = pbp::load_scenes(scenes_dir);
  const pbp::MetricsReport report = pbp::evaluate_scenes(
      params, scenes, make_predict_config(settings), make_batch_options(settings));

  pbp::write_metrics_json(report, out_path);
  if (offroad_csv.empty()) offroad_csv = sibling_path(out_path, "_offroad.csv");
  pbp::write_offroad_csv(report, offroad_csv);
  if (!svg_path.empty()) {
    pbp::SvgSeries series{decoder_kind_name(params.decoder), {}, {}};
    for (std::size_t t = 0; t < report.offroad_by_horizon.size(); ++t) {
      series.x.push_back(static_cast<double>(t + 1));
      series.y.push_back(report.offroad_by_horizon[t]);
    }
    pbp::write_svg_line_chart(svg_path, "Offroad rate vs horizon", "horizon step",
                              "offroad rate", {series});
  }
  std::cout << pbp::metrics_to_json(report) << "\n";
  return 0;
}

int cmd_ablate(const CliSettings& settings, const std::string& scenes_dir,
               const std::string& out_dir, const std::string& decoders_arg) {
  pbp::AblationConfig config;
  config.model = settings.model;
  config.train = settings.train;
  config.train.seed = settings.seed;
  config.train.threads = settings.threads;
  config.predict = make_predict_config(settings);
  config.train_fraction = settings.train_fraction;

  std::stringstream names(decoders_arg);
  std::string name;
  while (std::getline(names, name, ','))
    if (!name.empty()) config.decoders.push_back(pbp::decoder_kind_from_name(name));

  const auto scenes = pbp::load_scenes(scenes_dir);
  const auto rows =
      pbp::run_ablation(scenes, config, make_batch_options(settings), &std::cerr);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  pbp::write_ablation_csv(rows, (out / "ablation.csv").string());

  std::vector<pbp::SvgSeries> series;
  for (const pbp::AblationRow& row : rows) {
    const std::string dname = pbp::decoder_kind_name(row.decoder);
    pbp::write_offroad_csv(row.metrics,
                           (out / ("offroad_by_horizon_" + dname + ".csv")).string());
    pbp::save_model_file(row.params, (out / ("model_" + dname + ".json")).string());
    pbp::SvgSeries s{dname, {}, {}};
    for (std::size_t t = 0; t < row.metrics.offroad_by_horizon.size(); ++t) {
      s.x.push_back(static_cast<double>(t + 1));
      s.y.push_back(row.metrics.offroad_by_horizon[t]);
    }
    series.push_back(std::move(s));
  }
  pbp::write_svg_line_chart((out / "offroad_rate.svg").string(),
                            "Offroad rate vs horizon", "horizon step", "offroad rate",
                            series);
  std::cout << "wrote ablation outputs to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-based trajectory prediction on synthetic lane graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  CliSettings settings;
  std::string config_path;
  // Config file first, explicit flags override it.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  try {
    if (!config_path.empty()) apply_config_file(settings, config_path);
  } catch (const pbp::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 1;
  }
  app.add_option("--config", config_path, "JSON config mirroring module parameter names");
  app.add_option("--seed", settings.seed, "global random seed");
  app.add_option("--threads", settings.threads, "worker threads (0 = all cores)");

  auto* gen_cmd = app.add_subcommand("generate", "write synthetic scenario files");
  std::string layout = "straight", gen_out = "scenes";
  gen_cmd->add_option("--layout", layout,
                      "straight|curve|fork|merge|grid|lane_change|mixed");
  gen_cmd->add_option("--scenes,--n-scenes", settings.gen.n_scenes, "number of scenes");
  gen_cmd->add_option("--out", gen_out, "output directory");
  gen_cmd->add_option("--speed-min", settings.gen.speed_min, "m/s");
  gen_cmd->add_option("--speed-max", settings.gen.speed_max, "m/s");
  gen_cmd->add_option("--noise", settings.gen.lateral_noise_sigma, "lateral sigma (m)");
  gen_cmd->add_option("--path-free-fraction", settings.gen.path_free_fraction, "[0,1]");

  auto* train_cmd = app.add_subcommand("train", "fit a decoder on a scenario directory");
  std::string train_scenes, train_out = "model.json", train_decoder = "pbp", loss_csv;
  train_cmd->add_option("--scenes", train_scenes, "scenario directory")->required();
  train_cmd->add_option("--out", train_out, "checkpoint path");
  train_cmd->add_option("--decoder", train_decoder,
                        "pbp|pbp_cartesian|goal_based|multimodal_regression");
  train_cmd->add_option("--epochs", settings.train.epochs, "training epochs");
  train_cmd->add_option("--lr", settings.train.learning_rate, "learning rate");
  train_cmd->add_option("--lambda-cls", settings.train.lambda_cls, "classification weight");
  train_cmd->add_option("--lambda-lateral", settings.train.lambda_lateral, "lateral weight");
  train_cmd->add_option("--batch-size", settings.train.batch_size, "scenes per step");
  train_cmd->add_option("--weight-decay", settings.train.weight_decay, "decoupled decay");
  train_cmd->add_option("--loss-csv", loss_csv, "per-epoch loss CSV path");

  auto* predict_cmd = app.add_subcommand("predict", "predict one scenario file");
  std::string predict_model, predict_scene, predict_out = "prediction.json";
  predict_cmd->add_option("--model", predict_model, "checkpoint path")->required();
  predict_cmd->add_option("--scene", predict_scene, "scenario file")->required();
  predict_cmd->add_option("--out", predict_out, "prediction JSON path");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model over a scenario directory");
  std::string eval_model, eval_scenes, eval_out = "metrics.json", eval_csv, eval_svg;
  eval_cmd->add_option("--model", eval_model, "checkpoint path")->required();
  eval_cmd->add_option("--scenes", eval_scenes, "scenario directory")->required();
  eval_cmd->add_option("--out", eval_out, "metrics JSON path");
  eval_cmd->add_option("--offroad-csv", eval_csv, "per-horizon offroad CSV path");
  eval_cmd->add_option("--svg", eval_svg, "optional offroad-vs-horizon SVG");

  auto* ablate_cmd = app.add_subcommand("ablate", "train and compare decoder variants");
  std::string ablate_scenes, ablate_out = "ablation",
              ablate_decoders = "pbp,pbp_cartesian,goal_based,multimodal_regression";
  ablate_cmd->add_option("--scenes", ablate_scenes, "scenario directory")->required();
  ablate_cmd->add_option("--out", ablate_out, "output directory");
  ablate_cmd->add_option("--decoders", ablate_decoders, "comma-separated decoder list");
  ablate_cmd->add_option("--epochs", settings.train.epochs, "training epochs");
  ablate_cmd->add_option("--train-fraction", settings.train_fraction, "split fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return cmd_generate(settings, layout, gen_out);
    if (train_cmd->parsed())
      return cmd_train(settings, train_scenes, train_decoder, train_out, loss_csv);
    if (predict_cmd->parsed())
      return cmd_predict(settings, predict_model, predict_scene, predict_out);
    if (eval_cmd->parsed())
      return cmd_eval(settings, eval_model, eval_scenes, eval_out, eval_csv, eval_svg);
    if (ablate_cmd->parsed())
      return cmd_ablate(settings, ablate_scenes, ablate_out, ablate_decoders);
  } catch (const pbp::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error [E_INTERNAL]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
