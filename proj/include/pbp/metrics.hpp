#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbp/lane_graph.hpp"
#include "pbp/predictor.hpp"

namespace pbp {

// Miss-rate threshold on the final-waypoint displacement.
inline constexpr double kMissThreshold = 2.0;

// Indices of the top-k modes by probability, ties by lower mode index.
std::vector<std::size_t> top_k_modes(const PredictionSet& preds, int k);

// Best-of-k displacement metrics over the top-k modes.
double min_ade(const PredictionSet& preds, const std::vector<Vec2>& gt, int k);
double min_fde(const PredictionSet& preds, const std::vector<Vec2>& gt, int k);

// Fraction of samples whose best-of-k final displacement exceeds threshold.
double miss_rate(const std::vector<std::pair<const PredictionSet*, const std::vector<Vec2>*>>&
                     dataset,
                 int k, double threshold = kMissThreshold);

struct OffroadResult {
  double overall = 0.0;
  std::vector<double> by_horizon;  // one entry per step
};

// Waypoints outside the drivable area, over every mode of the set.
OffroadResult offroad_rate(const PredictionSet& preds, const LaneGraph& map);

// Mean nearest-centerline distance over every waypoint of every mode.
double lane_deviation(const PredictionSet& preds, const LaneGraph& map);

// Fraction of trajectories with no offroad waypoint.
double dac(const PredictionSet& preds, const LaneGraph& map);

struct MetricsReport {
  std::map<int, double> min_ade;    // K -> metres
  std::map<int, double> min_fde;    // K -> metres
  std::map<int, double> miss_rate;  // K -> rate
  double offroad_rate = 0.0;
  std::vector<double> offroad_by_horizon;
  double lane_deviation = 0.0;
  double dac = 0.0;
  int num_scenes = 0;
};

// Streaming aggregation over evaluated scenes; K values fixed at {1, 6}
// unless overridden.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(std::vector<int> k_values = {1, 6});

  void add(const PredictionSet& preds, const std::vector<Vec2>& gt, const LaneGraph& map);
  MetricsReport report() const;  // throws E_METRIC when nothing was added

 private:
  std::vector<int> k_values_;
  std::map<int, double> ade_sum_, fde_sum_;
  std::map<int, long> miss_count_;
  std::vector<long> offroad_by_horizon_;
  long offroad_waypoints_ = 0;
  long total_waypoints_ = 0;
  long compliant_trajectories_ = 0;
  long total_trajectories_ = 0;
  double deviation_sum_ = 0.0;
  long num_scenes_ = 0;
};

std::string metrics_to_json(const MetricsReport& report);
void write_metrics_json(const MetricsReport& report, const std::string& path);
void write_offroad_csv(const MetricsReport& report, const std::string& path);

}  // namespace pbp
