#include <algorithm>
#include <random>

#include "doctest.h"
#include "pbp/batch.hpp"
#include "pbp/error.hpp"
#include "pbp/predictor.hpp"
#include "pbp/scenario_gen.hpp"
#include "pbp/trainer.hpp"

using pbp::DecoderKind;
using pbp::TrainingSample;

namespace {

// Small mixed corpus shared by the trainer tests.
std::vector<TrainingSample> make_samples(int n_scenes, double path_free_fraction,
                                         std::uint64_t seed,
                                         pbp::Layout layout = pbp::Layout::kStraight) {
  pbp::GenConfig gen;
  gen.layout = layout;
  gen.n_scenes = n_scenes;
  gen.seed = seed;
  gen.path_free_fraction = path_free_fraction;
  gen.speed_min = 4.0;
  gen.speed_max = 9.0;
  const auto scenes = pbp::generate(gen);
  return pbp::preprocess_scenes_serial(scenes, pbp::ModelConfig{}, pbp::SamplerParams{});
}

std::vector<const TrainingSample*> as_batch(const std::vector<TrainingSample>& samples) {
  std::vector<const TrainingSample*> batch;
  for (const auto& s : samples) batch.push_back(&s);
  return batch;
}

}  // namespace

TEST_CASE("smooth_l1 closed-form values") {
  CHECK(pbp::smooth_l1(3.0, 3.0) == 0.0);
  CHECK(pbp::smooth_l1(0.0, 0.5) == doctest::Approx(0.125));
  CHECK(pbp::smooth_l1(0.0, 4.0) == doctest::Approx(3.5));
  // Continuity across the transition.
  CHECK(pbp::smooth_l1(0.0, 1.0 - 1e-9) == doctest::Approx(pbp::smooth_l1(0.0, 1.0 + 1e-9)));
}

TEST_CASE("regression_loss: examples and independent summation") {
  pbp::FrenetTrajectory a, b;
  for (int t = 0; t < 30; ++t) {
    a.states.push_back({t * 1.0, 0.2 * t});
    b.states.push_back({t * 1.0, 0.2 * t});
  }
  CHECK(pbp::regression_loss(a, b, 1.0) == 0.0);

  b.states[7].s += 0.5;
  CHECK(pbp::regression_loss(a, b, 1.0) == doctest::Approx(0.125));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const double lambda = 0.7;
  for (int trial = 0; trial < 20; ++trial) {
    pbp::FrenetTrajectory p, q;
    double manual = 0.0;
    for (int t = 0; t < 30; ++t) {
      p.states.push_back({u(rng), u(rng)});
      q.states.push_back({u(rng), u(rng)});
      manual += pbp::smooth_l1(q.states[t].s, p.states[t].s) +
                lambda * pbp::smooth_l1(q.states[t].d, p.states[t].d);
    }
    CHECK(pbp::regression_loss(p, q, lambda) == doctest::Approx(manual).epsilon(1e-12));
  }

  pbp::FrenetTrajectory short_traj;
  short_traj.states.resize(10);
  CHECK_THROWS_AS(pbp::regression_loss(a, short_traj, 1.0), pbp::Error);
}

TEST_CASE("total_loss equals the manual composition on a single on-path agent") {
  const auto samples = make_samples(6, 0.0, 51);
  const TrainingSample* picked = nullptr;
  for (const auto& s : samples)
    if (s.on_path()) {
      picked = &s;
      break;
    }
  REQUIRE(picked != nullptr);

  pbp::ModelConfig config;
  const auto params = pbp::make_model(config, DecoderKind::kPbp, 7);
  pbp::TrainConfig tc;
  tc.lambda_lateral = 0.8;
  tc.lambda_cls = 1.3;

  const TrainingSample* batch[] = {picked};
  const auto report = pbp::total_loss(std::span(batch, 1), params, tc);

  // Manual composition through the inference-side forwards.
  const auto& cs = picked->candidates;
  REQUIRE(cs.gt_index.has_value());

  // Classification term.
  std::vector<double> logits;
  for (std::size_t i = 0; i < cs.paths.size(); ++i) {
    const auto z_p = params.path_encoder.forward(
        std::span(picked->path_raw[i].data(), pbp::kPathRawDim));
    const auto z_ap = params.agent_path_encoder.forward(
        std::span(picked->agent_path_raw[i].data(), pbp::kAgentPathRawDim));
    std::vector<double> x = picked->agent_feature;
    x.insert(x.end(), z_p.begin(), z_p.end());
    x.insert(x.end(), z_ap.begin(), z_ap.end());
    logits.push_back(params.path_classifier.forward(x)[0]);
  }
  const auto probs = pbp::softmax(logits);
  const double manual_cls = -std::log(probs[*cs.gt_index]);

  // Regression term through decode_frenet on the ground-truth path.
  const auto z_gt = params.path_encoder.forward(
      std::span(picked->path_raw[*cs.gt_index].data(), pbp::kPathRawDim));
  pbp::FrenetTrajectory hist;
  hist.states.resize(config.history_steps);
  for (int t = 0; t < config.history_steps; ++t) {
    hist.states[t].s = picked->hist_frenet_deltas[2 * t] / pbp::kFeatureScale + picked->s0;
    hist.states[t].d = picked->hist_frenet_deltas[2 * t + 1] / pbp::kFeatureScale;
  }
  const auto pred =
      pbp::decode_frenet(params, picked->agent_feature, cs.paths[*cs.gt_index],
                         std::vector<double>(z_gt.begin(), z_gt.end()), hist);
  pbp::FrenetTrajectory gt;
  gt.states = picked->gt_frenet;
  double manual_s = 0.0, manual_d = 0.0;
  for (int t = 0; t < config.horizon_steps; ++t) {
    manual_s += pbp::smooth_l1(gt.states[t].s, pred.states[t].s);
    manual_d += pbp::smooth_l1(gt.states[t].d, pred.states[t].d);
  }
  CHECK(pbp::regression_loss(pred, gt, tc.lambda_lateral) ==
        doctest::Approx(manual_s + tc.lambda_lateral * manual_d).epsilon(1e-12));

  // Selector term.
  const double p_free = pbp::select_decoder(params, picked->agent_feature);
  const double manual_sel = -std::log(1.0 - p_free);

  const double manual_total =
      tc.lambda_cls * manual_cls + manual_s + tc.lambda_lateral * manual_d + manual_sel;
  CHECK(report.cls_loss == doctest::Approx(manual_cls).epsilon(1e-10));
  CHECK(report.reg_loss_s == doctest::Approx(manual_s).epsilon(1e-10));
  CHECK(report.reg_loss_d == doctest::Approx(manual_d).epsilon(1e-10));
  CHECK(report.selector_loss == doctest::Approx(manual_sel).epsilon(1e-10));
  CHECK(report.path_free_loss == 0.0);
  CHECK(report.total == doctest::Approx(manual_total).epsilon(1e-10));
}

TEST_CASE("total_loss: path-free-only batch has zero classification loss") {
  const auto samples = make_samples(4, 1.0, 33);
  for (const auto& s : samples) REQUIRE(s.is_path_free);
  pbp::ModelConfig config;
  const auto params = pbp::make_model(config, DecoderKind::kPbp, 3);
  const auto report = pbp::total_loss(as_batch(samples), params, pbp::TrainConfig{});
  CHECK(report.cls_loss == 0.0);
  CHECK(report.reg_loss_s == 0.0);
  CHECK(report.path_free_loss > 0.0);
  CHECK(report.selector_loss > 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  const auto samples = make_samples(5, 0.25, 77);
  const auto batch = as_batch(samples);

  for (const DecoderKind kind : {DecoderKind::kPbp, DecoderKind::kGoalBased,
                                 DecoderKind::kMultimodalRegression}) {
    pbp::ModelConfig config;
    auto params = pbp::make_model(config, kind, 13);
    pbp::TrainConfig tc;
    tc.lambda_lateral = 0.9;
    tc.lambda_cls = 1.1;

    pbp::GradientSet grads;
    grads.resize_like(params);
    pbp::total_loss(batch, params, tc, &grads);

    std::mt19937_64 rng(55);
    auto heads = params.active_heads();
    const double h = 1e-5;
    int checked = 0;
    while (checked < 8) {
      const std::size_t hi = std::uniform_int_distribution<std::size_t>(0, heads.size() - 1)(rng);
      auto& head = *heads[hi].second;
      const std::size_t pi =
          std::uniform_int_distribution<std::size_t>(0, head.params.size() - 1)(rng);
      const double saved = head.params[pi];
      head.params[pi] = saved + h;
      const double up = pbp::total_loss(batch, params, tc).total;
      head.params[pi] = saved - h;
      const double down = pbp::total_loss(batch, params, tc).total;
      head.params[pi] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double analytic = grads.by_head[hi][pi];
      if (std::abs(fd) < 1e-7 && std::abs(analytic) < 1e-7) continue;  // dead unit
      const double rel = std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic)});
      INFO("head " << heads[hi].first << " param " << pi << " fd " << fd << " analytic "
                   << analytic);
      CHECK(rel < 1e-4);
      ++checked;
    }
  }
}

TEST_CASE("teacher forcing: non-gt path features do not move the regression loss") {
  auto samples = make_samples(4, 0.0, 19);
  TrainingSample* picked = nullptr;
  for (auto& s : samples)
    if (s.on_path() && s.candidates.paths.size() >= 3) {
      picked = &s;
      break;
    }
  REQUIRE(picked != nullptr);

  pbp::ModelConfig config;
  const auto params = pbp::make_model(config, DecoderKind::kPbp, 29);
  const TrainingSample* batch[] = {picked};
  const auto before = pbp::total_loss(std::span(batch, 1), params, pbp::TrainConfig{});

  const std::size_t gt = *picked->candidates.gt_index;
  const std::size_t other = gt == 0 ? 1 : 0;
  for (double& v : picked->path_raw[other]) v += 0.37;  // perturb a non-gt candidate
  const auto after = pbp::total_loss(std::span(batch, 1), params, pbp::TrainConfig{});

  CHECK(after.reg_loss_s == before.reg_loss_s);  // regression sees only the gt path
  CHECK(after.reg_loss_d == before.reg_loss_d);
  CHECK(after.cls_loss != before.cls_loss);      // classification sees all of them
}

TEST_CASE("loss is invariant to candidate permutation up to index remapping") {
  auto samples = make_samples(3, 0.0, 101);
  TrainingSample* picked = nullptr;
  for (auto& s : samples)
    if (s.on_path() && s.candidates.paths.size() >= 4) {
      picked = &s;
      break;
    }
  REQUIRE(picked != nullptr);

  pbp::ModelConfig config;
  const auto params = pbp::make_model(config, DecoderKind::kPbp, 61);
  const TrainingSample* batch[] = {picked};
  const double before = pbp::total_loss(std::span(batch, 1), params, pbp::TrainConfig{}).total;

  // Rotate the candidate ordering by one and remap the gt index.
  const std::size_t n = picked->candidates.paths.size();
  std::rotate(picked->candidates.paths.begin(), picked->candidates.paths.begin() + 1,
              picked->candidates.paths.end());
  std::rotate(picked->path_raw.begin(), picked->path_raw.begin() + 1, picked->path_raw.end());
  std::rotate(picked->agent_path_raw.begin(), picked->agent_path_raw.begin() + 1,
              picked->agent_path_raw.end());
  std::rotate(picked->goal_raw.begin(), picked->goal_raw.begin() + 1, picked->goal_raw.end());
  picked->candidates.gt_index = (*picked->candidates.gt_index + n - 1) % n;

  const double after = pbp::total_loss(std::span(batch, 1), params, pbp::TrainConfig{}).total;
  CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("train: zero learning rate and zero decay change nothing") {
  const auto samples = make_samples(4, 0.0, 11);
  pbp::ModelConfig config;
  pbp::TrainConfig tc;
  tc.learning_rate = 0.0;
  tc.weight_decay = 0.0;
  tc.epochs = 2;
  tc.seed = 17;
  const auto result = pbp::train(samples, config, DecoderKind::kPbp, tc);
  const auto fresh = pbp::make_model(config, DecoderKind::kPbp, 17);
  for (std::size_t h = 0; h < fresh.active_heads().size(); ++h) {
    const auto& a = result.params.active_heads()[h].second->params;
    const auto& b = fresh.active_heads()[h].second->params;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("train: fixed seed gives bitwise-identical parameters, any thread count") {
  const auto samples = make_samples(6, 0.25, 23);
  pbp::ModelConfig config;
  pbp::TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 41;

  tc.threads = 1;
  const auto a = pbp::train(samples, config, DecoderKind::kPbp, tc);
  tc.threads = 2;
  const auto b = pbp::train(samples, config, DecoderKind::kPbp, tc);
  const auto c = pbp::train(samples, config, DecoderKind::kPbp, tc);

  CHECK(pbp::model_to_json(a.params) == pbp::model_to_json(b.params));
  CHECK(pbp::model_to_json(b.params) == pbp::model_to_json(c.params));
}

TEST_CASE("train: loss decreases on a small corpus") {
  const auto samples = make_samples(24, 0.2, 67, pbp::Layout::kCurve);
  pbp::ModelConfig config;
  pbp::TrainConfig tc;
  tc.epochs = 10;
  tc.seed = 5;
  const auto result = pbp::train(samples, config, DecoderKind::kPbp, tc);
  CHECK(result.history.back().total < 0.5 * result.history.front().total);
}

TEST_CASE("non-finite loss aborts naming the offending component") {
  const auto samples = make_samples(2, 0.0, 3);
  pbp::ModelConfig config;
  auto params = pbp::make_model(config, DecoderKind::kPbp, 1);
  for (double& v : params.frenet_regressor.params) v = 1e200;  // force an overflow
  try {
    pbp::total_loss(as_batch(samples), params, pbp::TrainConfig{});
    FAIL("expected a non-finite loss error");
  } catch (const pbp::Error& e) {
    CHECK(e.code() == std::string(pbp::err::kTrain));
    CHECK(std::string(e.what()).find("regression") != std::string::npos);
  }
}
