#include "pbp/ablation.hpp"

#include <fstream>
#include <ostream>

#include "pbp/error.hpp"
#include "pbp/scenario_gen.hpp"

namespace pbp {

std::vector<AblationRow> run_ablation(const std::vector<Scene>& scenes,
                                      const AblationConfig& config,
                                      const BatchOptions& options, std::ostream* log) {
  if (config.decoders.empty())
    throw Error(err::kConfig, "ablation needs at least one decoder");

  // Identical data and seed for every decoder.
  auto [train_scenes, val_scenes] =
      split(std::vector<Scene>(scenes), config.train_fraction, config.train.seed);
  if (train_scenes.empty() || val_scenes.empty())
    throw Error(err::kConfig, "ablation split produced an empty subset");

  const std::vector<TrainingSample> samples =
      preprocess_scenes(train_scenes, config.model, config.predict.sampler, options);

  std::vector<AblationRow> rows;
  for (DecoderKind kind : config.decoders) {
    if (log)
      *log << "[ablate] training " << decoder_kind_name(kind) << " ("
           << config.train.epochs << " epochs, " << samples.size() << " scenes)\n";
    TrainResult trained = train(samples, config.model, kind, config.train);
    if (log)
      *log << "[ablate] " << decoder_kind_name(kind)
           << " loss " << trained.history.front().total << " -> "
           << trained.history.back().total << "\n";
    AblationRow row;
    row.decoder = kind;
    row.metrics = evaluate_scenes(trained.params, val_scenes, config.predict, options);
    row.params = std::move(trained.params);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(err::kIo, "cannot write ablation CSV " + path);
  out << "decoder,minFDE_1,MR_1,minFDE_6,MR_6,offroad_rate,lane_dev\n";
  out.precision(17);
  for (const AblationRow& row : rows) {
    const MetricsReport& m = row.metrics;
    out << decoder_kind_name(row.decoder) << ',' << m.min_fde.at(1) << ','
        << m.miss_rate.at(1) << ',' << m.min_fde.at(6) << ',' << m.miss_rate.at(6) << ','
        << m.offroad_rate << ',' << m.lane_deviation << "\n";
  }
}

}  // namespace pbp
