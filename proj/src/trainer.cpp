#include "pbp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pbp/error.hpp"

namespace pbp {

double smooth_l1(double x, double y) {
  const double e = std::abs(x - y);
  return e < 1.0 ? 0.5 * e * e : e - 0.5;
}

namespace {

// d/dx smooth_l1(x, y)
double smooth_l1_grad(double x, double y) {
  const double e = x - y;
  return e < -1.0 ? -1.0 : (e > 1.0 ? 1.0 : e);
}

double stable_bce(double logit, double label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

std::vector<double> concat(std::span<const double> a, std::span<const double> b,
                           std::span<const double> c) {
  std::vector<double> out;
  out.reserve(a.size() + b.size() + c.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

// Per-component gradient scales; zero counts disable a component.
struct ComponentWeights {
  double cls = 0.0;
  double reg_s = 0.0;
  double reg_d = 0.0;
  double selector = 0.0;
  double path_free = 0.0;
};

// Raw (unaveraged) loss terms of one agent.
struct AgentTerms {
  double cls = 0.0;
  double reg_s = 0.0;
  double reg_d = 0.0;
  double selector = 0.0;
  double path_free = 0.0;
  bool has_cls = false;
  bool has_reg = false;
  bool has_selector = false;
  bool has_path_free = false;
};

// Head slots in the GradientSet, resolved once per decoder kind.
struct HeadSlots {
  int encoder = -1;     // path_encoder or goal_encoder
  int ap_encoder = -1;  // agent_path_encoder
  int classifier = -1;  // path_classifier or goal_classifier
  int regressor = -1;   // frenet / cartesian / goal regressor
  int path_free = -1;
  int selector = -1;
};

HeadSlots resolve_slots(const ModelParams& params) {
  HeadSlots slots;
  const auto heads = params.active_heads();
  for (int i = 0; i < static_cast<int>(heads.size()); ++i) {
    const std::string& name = heads[i].first;
    if (name == "path_encoder" || name == "goal_encoder") slots.encoder = i;
    if (name == "agent_path_encoder") slots.ap_encoder = i;
    if (name == "path_classifier" || name == "goal_classifier") slots.classifier = i;
    if (name == "frenet_regressor" || name == "cartesian_regressor" ||
        name == "goal_regressor")
      slots.regressor = i;
    if (name == "path_free_regressor") slots.path_free = i;
    if (name == "selector") slots.selector = i;
  }
  return slots;
}

// Longitudinal/lateral smooth-L1 on accumulated regressor outputs; shared by
// the Frenet head (s, d vs. gt Frenet states) and the Cartesian-style heads
// (agent-frame x, y). Returns (loss_long, loss_lat) and, when grads are
// requested, fills d(loss)/d(raw outputs).
std::pair<double, double> accumulated_regression_terms(
    std::span<const double> y, double origin_long, std::span<const double> gt_long,
    std::span<const double> gt_lat, double w_long, double w_lat,
    std::vector<double>* dy) {
  const int horizon = static_cast<int>(gt_long.size());
  double loss_long = 0.0, loss_lat = 0.0;
  std::vector<double> pred_long(horizon);
  double acc = origin_long;
  for (int t = 0; t < horizon; ++t) {
    acc += y[t];
    pred_long[t] = acc;
    loss_long += smooth_l1(pred_long[t], gt_long[t]);
    loss_lat += smooth_l1(y[horizon + t], gt_lat[t]);
  }
  if (dy) {
    dy->assign(2 * horizon, 0.0);
    double suffix = 0.0;
    for (int t = horizon - 1; t >= 0; --t) {
      suffix += smooth_l1_grad(pred_long[t], gt_long[t]) * w_long;
      (*dy)[t] = suffix;
      (*dy)[horizon + t] = smooth_l1_grad(y[horizon + t], gt_lat[t]) * w_lat;
    }
  }
  return {loss_long, loss_lat};
}

AgentTerms agent_loss(const TrainingSample& sample, const ModelParams& params,
                      const ComponentWeights& w, const HeadSlots& slots,
                      GradientSet* grads) {
  AgentTerms terms;
  const ModelConfig& cfg = params.config;
  const int horizon = cfg.horizon_steps;
  const bool multimodal = params.decoder == DecoderKind::kMultimodalRegression;
  const bool goal_based = params.decoder == DecoderKind::kGoalBased;
  const auto& f_a = sample.agent_feature;

  // --- path / goal classification + teacher-forced regression -------------
  if (!multimodal && sample.on_path()) {
    const std::size_t n = sample.candidates.paths.size();
    const std::size_t gt = *sample.candidates.gt_index;
    const Mlp& encoder = goal_based ? params.goal_encoder : params.path_encoder;
    const Mlp& classifier = goal_based ? params.goal_classifier : params.path_classifier;

    std::vector<MlpCache> enc_cache(n), ap_cache(goal_based ? 0 : n), cls_cache(n);
    std::vector<std::vector<double>> enc_out(n), ap_out(n);
    std::vector<double> logits(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (goal_based) {
        enc_out[i] = encoder.forward(
            std::span(sample.goal_raw[i].data(), kGoalRawDim), &enc_cache[i]);
        logits[i] = classifier.forward(concat(f_a, enc_out[i], {}), &cls_cache[i])[0];
      } else {
        enc_out[i] = encoder.forward(
            std::span(sample.path_raw[i].data(), kPathRawDim), &enc_cache[i]);
        ap_out[i] = params.agent_path_encoder.forward(
            std::span(sample.agent_path_raw[i].data(), kAgentPathRawDim), &ap_cache[i]);
        logits[i] = classifier.forward(concat(f_a, enc_out[i], ap_out[i]), &cls_cache[i])[0];
      }
    }
    const std::vector<double> probs = softmax(logits);
    terms.cls = -std::log(std::max(probs[gt], 1e-300));
    terms.has_cls = true;

    if (grads) {
      const int enc_dim = goal_based ? cfg.goal_dim : cfg.path_dim;
      for (std::size_t i = 0; i < n; ++i) {
        const double dlogit = (probs[i] - (i == gt ? 1.0 : 0.0)) * w.cls;
        std::vector<double> dx;
        classifier.backward(cls_cache[i], std::span(&dlogit, 1),
                            grads->by_head[slots.classifier], &dx);
        encoder.backward(enc_cache[i],
                         std::span(dx.data() + cfg.agent_dim, enc_dim),
                         grads->by_head[slots.encoder]);
        if (!goal_based)
          params.agent_path_encoder.backward(
              ap_cache[i], std::span(dx.data() + cfg.agent_dim + enc_dim, cfg.agent_path_dim),
              grads->by_head[slots.ap_encoder]);
      }
    }

    // Teacher forcing: the regressor only ever sees the ground-truth path.
    const Mlp& regressor = params.decoder == DecoderKind::kPbp ? params.frenet_regressor
                           : goal_based                        ? params.goal_regressor
                                                               : params.cartesian_regressor;
    MlpCache enc_gt_cache, reg_cache;
    const std::vector<double> z_gt =
        goal_based
            ? encoder.forward(std::span(sample.goal_raw[gt].data(), kGoalRawDim), &enc_gt_cache)
            : encoder.forward(std::span(sample.path_raw[gt].data(), kPathRawDim), &enc_gt_cache);
    const bool frenet = params.decoder == DecoderKind::kPbp;
    const auto& hist = frenet ? sample.hist_frenet_deltas : sample.hist_cartesian_deltas;
    const std::vector<double> y = regressor.forward(concat(f_a, z_gt, hist), &reg_cache);

    std::vector<double> gt_long(horizon), gt_lat(horizon);
    for (int t = 0; t < horizon; ++t) {
      gt_long[t] = frenet ? sample.gt_frenet[t].s : sample.gt_agent_frame[t].x;
      gt_lat[t] = frenet ? sample.gt_frenet[t].d : sample.gt_agent_frame[t].y;
    }
    std::vector<double> dy;
    const auto [ls, ld] = accumulated_regression_terms(
        y, frenet ? sample.s0 : 0.0, gt_long, gt_lat, w.reg_s, w.reg_d,
        grads ? &dy : nullptr);
    terms.reg_s = ls;
    terms.reg_d = ld;
    terms.has_reg = true;

    if (grads) {
      std::vector<double> dx;
      regressor.backward(reg_cache, dy, grads->by_head[slots.regressor], &dx);
      const int enc_dim = goal_based ? cfg.goal_dim : cfg.path_dim;
      encoder.backward(enc_gt_cache, std::span(dx.data() + cfg.agent_dim, enc_dim),
                       grads->by_head[slots.encoder]);
    }
  }

  // --- binary decoder selector ---------------------------------------------
  if (!multimodal) {
    MlpCache sel_cache;
    const double logit = params.selector.forward(f_a, &sel_cache)[0];
    const double label = sample.is_path_free ? 1.0 : 0.0;
    terms.selector = stable_bce(logit, label);
    terms.has_selector = true;
    if (grads) {
      const double dlogit = (sigmoid(logit) - label) * w.selector;
      params.selector.backward(sel_cache, std::span(&dlogit, 1),
                               grads->by_head[slots.selector]);
    }
  }

  // --- winner-takes-all multimodal head ------------------------------------
  if (multimodal || sample.is_path_free) {
    const int k = cfg.num_modes;
    MlpCache pf_cache;
    const std::vector<double> y = params.path_free_regressor.forward(f_a, &pf_cache);

    const Vec2 gt_end = sample.gt_agent_frame.back();
    int best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int m = 0; m < k; ++m) {
      const Vec2 end{y[m * 2 * horizon + 2 * (horizon - 1)],
                     y[m * 2 * horizon + 2 * (horizon - 1) + 1]};
      const double e = (end - gt_end).norm();
      if (e < best_err) {
        best_err = e;
        best = m;
      }
    }
    double loss = 0.0;
    for (int t = 0; t < horizon; ++t) {
      loss += smooth_l1(y[best * 2 * horizon + 2 * t], sample.gt_agent_frame[t].x);
      loss += smooth_l1(y[best * 2 * horizon + 2 * t + 1], sample.gt_agent_frame[t].y);
    }
    terms.path_free = loss;
    terms.has_path_free = true;

    if (grads) {
      std::vector<double> dy(y.size(), 0.0);
      for (int t = 0; t < horizon; ++t) {
        dy[best * 2 * horizon + 2 * t] =
            smooth_l1_grad(y[best * 2 * horizon + 2 * t], sample.gt_agent_frame[t].x) *
            w.path_free;
        dy[best * 2 * horizon + 2 * t + 1] =
            smooth_l1_grad(y[best * 2 * horizon + 2 * t + 1], sample.gt_agent_frame[t].y) *
            w.path_free;
      }
      params.path_free_regressor.backward(pf_cache, dy, grads->by_head[slots.path_free]);
    }
  }
  return terms;
}

void check_finite(double v, const char* component) {
  if (!std::isfinite(v))
    throw Error(err::kTrain, std::string("non-finite loss in the ") + component + " head");
}

}  // namespace

double regression_loss(const FrenetTrajectory& pred, const FrenetTrajectory& gt,
                       double lambda_lateral) {
  if (pred.states.size() != gt.states.size())
    throw Error(err::kShape, "regression_loss length mismatch");
  double total = 0.0;
  for (std::size_t t = 0; t < pred.states.size(); ++t)
    total += smooth_l1(gt.states[t].s, pred.states[t].s) +
             lambda_lateral * smooth_l1(gt.states[t].d, pred.states[t].d);
  return total;
}

void GradientSet::resize_like(const ModelParams& params) {
  const auto heads = params.active_heads();
  by_head.resize(heads.size());
  for (std::size_t i = 0; i < heads.size(); ++i)
    by_head[i].assign(heads[i].second->params.size(), 0.0);
}

void GradientSet::set_zero() {
  for (auto& g : by_head) std::fill(g.begin(), g.end(), 0.0);
}

void GradientSet::add(const GradientSet& other) {
  for (std::size_t i = 0; i < by_head.size(); ++i)
    for (std::size_t j = 0; j < by_head[i].size(); ++j) by_head[i][j] += other.by_head[i][j];
}

LossReport total_loss(std::span<const TrainingSample* const> batch,
                      const ModelParams& params, const TrainConfig& config,
                      GradientSet* grads, int* skipped) {
  const bool multimodal = params.decoder == DecoderKind::kMultimodalRegression;

  int n_on_path = 0, n_labeled = 0, n_path_free = 0, n_skipped = 0;
  for (const TrainingSample* s : batch) {
    if (!s->has_future) {
      ++n_skipped;
      continue;
    }
    ++n_labeled;
    if (s->on_path()) ++n_on_path;
    if (s->is_path_free || multimodal) ++n_path_free;
  }
  if (skipped) *skipped += n_skipped;

  ComponentWeights w;
  if (!multimodal && n_on_path > 0) {
    w.cls = config.lambda_cls / n_on_path;
    w.reg_s = 1.0 / n_on_path;
    w.reg_d = config.lambda_lateral / n_on_path;
  }
  if (!multimodal && n_labeled > 0) w.selector = 1.0 / n_labeled;
  if (n_path_free > 0) w.path_free = 1.0 / n_path_free;

  std::vector<const TrainingSample*> usable;
  usable.reserve(batch.size());
  for (const TrainingSample* s : batch)
    if (s->has_future) usable.push_back(s);

  std::vector<AgentTerms> terms(usable.size());
  std::vector<GradientSet> agent_grads;
  if (grads) {
    agent_grads.resize(usable.size());
    for (auto& g : agent_grads) g.resize_like(params);
  }
  const HeadSlots slots = resolve_slots(params);

#ifdef _OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (usable.size() > 1)
#endif
  for (std::size_t i = 0; i < usable.size(); ++i)
    terms[i] = agent_loss(*usable[i], params, w, slots, grads ? &agent_grads[i] : nullptr);

  // Fixed reduction order keeps batches bitwise reproducible under any
  // thread count.
  LossReport report;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const AgentTerms& t = terms[i];
    if (t.has_cls) report.cls_loss += t.cls;
    if (t.has_reg) {
      report.reg_loss_s += t.reg_s;
      report.reg_loss_d += t.reg_d;
    }
    if (t.has_selector) report.selector_loss += t.selector;
    if (t.has_path_free) report.path_free_loss += t.path_free;
    if (grads) grads->add(agent_grads[i]);
  }
  if (n_on_path > 0) {
    report.cls_loss /= n_on_path;
    report.reg_loss_s /= n_on_path;
    report.reg_loss_d /= n_on_path;
  }
  if (n_labeled > 0 && !multimodal) report.selector_loss /= n_labeled;
  if (n_path_free > 0) report.path_free_loss /= n_path_free;

  check_finite(report.cls_loss, "path classification");
  check_finite(report.reg_loss_s, "trajectory regression (longitudinal)");
  check_finite(report.reg_loss_d, "trajectory regression (lateral)");
  check_finite(report.selector_loss, "decoder selector");
  check_finite(report.path_free_loss, "path-free regression");

  report.total = config.lambda_cls * report.cls_loss + report.reg_loss_s +
                 config.lambda_lateral * report.reg_loss_d + report.selector_loss +
                 report.path_free_loss;
  return report;
}

namespace {

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;

  void resize_like(const ModelParams& params) {
    const auto heads = params.active_heads();
    m.resize(heads.size());
    v.resize(heads.size());
    for (std::size_t i = 0; i < heads.size(); ++i) {
      m[i].assign(heads[i].second->params.size(), 0.0);
      v[i].assign(heads[i].second->params.size(), 0.0);
    }
  }

  void apply(ModelParams& params, const GradientSet& grads, const TrainConfig& cfg) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, step);
    const double bc2 = 1.0 - std::pow(beta2, step);
    auto heads = params.active_heads();
    for (std::size_t h = 0; h < heads.size(); ++h) {
      std::vector<double>& theta = heads[h].second->params;
      const std::vector<double>& g = grads.by_head[h];
      for (std::size_t j = 0; j < theta.size(); ++j) {
        m[h][j] = beta1 * m[h][j] + (1.0 - beta1) * g[j];
        v[h][j] = beta2 * v[h][j] + (1.0 - beta2) * g[j] * g[j];
        const double m_hat = m[h][j] / bc1;
        const double v_hat = v[h][j] / bc2;
        // Decoupled weight decay, scaled by the learning rate.
        theta[j] -= cfg.learning_rate *
                    (m_hat / (std::sqrt(v_hat) + eps) + cfg.weight_decay * theta[j]);
      }
    }
  }
};

}  // namespace

TrainResult train(const std::vector<TrainingSample>& dataset, const ModelConfig& config,
                  DecoderKind kind, const TrainConfig& train_config) {
  if (dataset.empty()) throw Error(err::kTrain, "empty training dataset");
  if (train_config.lambda_lateral < 0.0 || train_config.lambda_cls < 0.0 ||
      train_config.learning_rate < 0.0 || train_config.weight_decay < 0.0 ||
      train_config.epochs < 1)
    throw Error(err::kConfig, "training weights, rates, and epochs must be positive");

  TrainResult result;
  result.params = make_model(config, kind, train_config.seed);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].has_future)
      order.push_back(i);
    else
      ++result.skipped_agents;
  }
  if (order.empty()) throw Error(err::kTrain, "no labeled agents in training dataset");

  // Separate shuffle stream so data order is independent of weight init.
  std::mt19937_64 shuffle_rng(train_config.seed ^ 0x9e3779b97f4a7c15ULL);
  AdamState adam;
  adam.resize_like(result.params);
  GradientSet grads;
  grads.resize_like(result.params);

  const int batch_size = std::max(1, train_config.batch_size);
  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    LossReport epoch_report;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::vector<const TrainingSample*> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i)
        batch.push_back(&dataset[order[i]]);
      grads.set_zero();
      const LossReport r = total_loss(batch, result.params, train_config, &grads);
      adam.apply(result.params, grads, train_config);

      epoch_report.cls_loss += r.cls_loss;
      epoch_report.reg_loss_s += r.reg_loss_s;
      epoch_report.reg_loss_d += r.reg_loss_d;
      epoch_report.selector_loss += r.selector_loss;
      epoch_report.path_free_loss += r.path_free_loss;
      epoch_report.total += r.total;
      ++n_batches;
    }
    epoch_report.cls_loss /= n_batches;
    epoch_report.reg_loss_s /= n_batches;
    epoch_report.reg_loss_d /= n_batches;
    epoch_report.selector_loss /= n_batches;
    epoch_report.path_free_loss /= n_batches;
    epoch_report.total /= n_batches;
    result.history.push_back(epoch_report);
  }
  return result;
}

void write_loss_csv(const std::vector<LossReport>& history, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(err::kIo, "cannot write loss CSV " + path);
  out << "epoch,cls,reg_s,reg_d,selector,path_free,total\n";
  out.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const LossReport& r = history[i];
    out << (i + 1) << ',' << r.cls_loss << ',' << r.reg_loss_s << ',' << r.reg_loss_d << ','
        << r.selector_loss << ',' << r.path_free_loss << ',' << r.total << "\n";
  }
}

}  // namespace pbp
