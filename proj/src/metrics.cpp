#include "pbp/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "pbp/error.hpp"

namespace pbp {

std::vector<std::size_t> top_k_modes(const PredictionSet& preds, int k) {
  if (k < 1 || k > static_cast<int>(preds.trajectories.size()))
    throw Error(err::kShape, "top-k request exceeds available modes");
  std::vector<std::size_t> order(preds.trajectories.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds.probabilities[a] != preds.probabilities[b]
               ? preds.probabilities[a] > preds.probabilities[b]
               : a < b;
  });
  order.resize(k);
  return order;
}

double min_ade(const PredictionSet& preds, const std::vector<Vec2>& gt, int k) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m : top_k_modes(preds, k)) {
    const auto& traj = preds.trajectories[m];
    if (traj.size() != gt.size()) throw Error(err::kShape, "min_ade length mismatch");
    double sum = 0.0;
    for (std::size_t t = 0; t < gt.size(); ++t) sum += (traj[t] - gt[t]).norm();
    best = std::min(best, sum / static_cast<double>(gt.size()));
  }
  return best;
}

double min_fde(const PredictionSet& preds, const std::vector<Vec2>& gt, int k) {
  if (gt.empty()) throw Error(err::kShape, "min_fde with empty ground truth");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m : top_k_modes(preds, k)) {
    const auto& traj = preds.trajectories[m];
    if (traj.size() != gt.size()) throw Error(err::kShape, "min_fde length mismatch");
    best = std::min(best, (traj.back() - gt.back()).norm());
  }
  return best;
}

double miss_rate(const std::vector<std::pair<const PredictionSet*, const std::vector<Vec2>*>>&
                     dataset,
                 int k, double threshold) {
  if (dataset.empty()) throw Error(err::kMetric, "miss_rate over an empty dataset");
  long misses = 0;
  for (const auto& [preds, gt] : dataset)
    if (min_fde(*preds, *gt, k) > threshold) ++misses;
  return static_cast<double>(misses) / static_cast<double>(dataset.size());
}

OffroadResult offroad_rate(const PredictionSet& preds, const LaneGraph& map) {
  OffroadResult result;
  if (preds.trajectories.empty()) return result;
  const std::size_t horizon = preds.trajectories.front().size();
  result.by_horizon.assign(horizon, 0.0);
  long total_off = 0;
  for (const auto& traj : preds.trajectories)
    for (std::size_t t = 0; t < traj.size(); ++t)
      if (!map.contains_point(traj[t])) {
        result.by_horizon[t] += 1.0;
        ++total_off;
      }
  for (double& v : result.by_horizon) v /= static_cast<double>(preds.trajectories.size());
  result.overall = static_cast<double>(total_off) /
                   static_cast<double>(preds.trajectories.size() * horizon);
  return result;
}

double lane_deviation(const PredictionSet& preds, const LaneGraph& map) {
  if (map.segments().empty()) throw Error(err::kEmptyMap, "lane_deviation on empty map");
  double sum = 0.0;
  long count = 0;
  for (const auto& traj : preds.trajectories)
    for (const Vec2& p : traj) {
      sum += map.nearest_segment(p).second;
      ++count;
    }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

double dac(const PredictionSet& preds, const LaneGraph& map) {
  if (preds.trajectories.empty()) return 1.0;
  long compliant = 0;
  for (const auto& traj : preds.trajectories) {
    bool inside = true;
    for (const Vec2& p : traj) inside = inside && map.contains_point(p);
    compliant += inside ? 1 : 0;
  }
  return static_cast<double>(compliant) / static_cast<double>(preds.trajectories.size());
}

MetricsAccumulator::MetricsAccumulator(std::vector<int> k_values)
    : k_values_(std::move(k_values)) {
  for (int k : k_values_) {
    ade_sum_[k] = 0.0;
    fde_sum_[k] = 0.0;
    miss_count_[k] = 0;
  }
}

void MetricsAccumulator::add(const PredictionSet& preds, const std::vector<Vec2>& gt,
                             const LaneGraph& map) {
  for (int k : k_values_) {
    ade_sum_[k] += min_ade(preds, gt, k);
    const double fde = min_fde(preds, gt, k);
    fde_sum_[k] += fde;
    if (fde > kMissThreshold) ++miss_count_[k];
  }

  const std::size_t horizon = preds.trajectories.front().size();
  if (offroad_by_horizon_.empty()) offroad_by_horizon_.assign(horizon, 0);
  if (offroad_by_horizon_.size() != horizon)
    throw Error(err::kShape, "inconsistent horizon across evaluated scenes");
  for (const auto& traj : preds.trajectories) {
    bool compliant = true;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const bool inside = map.contains_point(traj[t]);
      if (!inside) {
        ++offroad_by_horizon_[t];
        ++offroad_waypoints_;
        compliant = false;
      }
      deviation_sum_ += map.nearest_segment(traj[t]).second;
      ++total_waypoints_;
    }
    compliant_trajectories_ += compliant ? 1 : 0;
    ++total_trajectories_;
  }
  ++num_scenes_;
}

MetricsReport MetricsAccumulator::report() const {
  if (num_scenes_ == 0) throw Error(err::kMetric, "metrics report over an empty dataset");
  MetricsReport report;
  report.num_scenes = static_cast<int>(num_scenes_);
  for (int k : k_values_) {
    report.min_ade[k] = ade_sum_.at(k) / num_scenes_;
    report.min_fde[k] = fde_sum_.at(k) / num_scenes_;
    report.miss_rate[k] = static_cast<double>(miss_count_.at(k)) / num_scenes_;
  }
  const long per_step = total_trajectories_;
  report.offroad_by_horizon.reserve(offroad_by_horizon_.size());
  for (long c : offroad_by_horizon_)
    report.offroad_by_horizon.push_back(static_cast<double>(c) /
                                        static_cast<double>(per_step));
  report.offroad_rate =
      static_cast<double>(offroad_waypoints_) / static_cast<double>(total_waypoints_);
  report.lane_deviation = deviation_sum_ / static_cast<double>(total_waypoints_);
  report.dac =
      static_cast<double>(compliant_trajectories_) / static_cast<double>(total_trajectories_);
  return report;
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json doc;
  for (const auto& [k, v] : report.min_ade) doc["min_ade"][std::to_string(k)] = v;
  for (const auto& [k, v] : report.min_fde) doc["min_fde"][std::to_string(k)] = v;
  for (const auto& [k, v] : report.miss_rate) doc["miss_rate"][std::to_string(k)] = v;
  doc["offroad_rate"] = report.offroad_rate;
  doc["offroad_by_horizon"] = report.offroad_by_horizon;
  doc["lane_deviation"] = report.lane_deviation;
  doc["dac"] = report.dac;
  doc["num_scenes"] = report.num_scenes;
  return doc.dump();
}

void write_metrics_json(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(err::kIo, "cannot write metrics JSON " + path);
  out << metrics_to_json(report) << "\n";
}

void write_offroad_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(err::kIo, "cannot write offroad CSV " + path);
  out << "horizon_step,offroad_rate\n";
  out.precision(17);
  for (std::size_t t = 0; t < report.offroad_by_horizon.size(); ++t)
    out << (t + 1) << ',' << report.offroad_by_horizon[t] << "\n";
}

}  // namespace pbp
