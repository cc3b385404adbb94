#include "pbp/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "pbp/error.hpp"

namespace pbp {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes(std::move(layer_sizes)) {
  if (sizes.size() < 2) throw Error(err::kConfig, "MLP needs at least two layer sizes");
  params.assign(param_count(sizes), 0.0);
}

std::size_t Mlp::param_count(const std::vector<int>& layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    n += static_cast<std::size_t>(layer_sizes[l + 1]) * layer_sizes[l] + layer_sizes[l + 1];
  return n;
}

void Mlp::init(std::mt19937_64& rng) {
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    std::normal_distribution<double> dist(0.0, std::sqrt(1.0 / fan_in));
    for (int i = 0; i < fan_out * fan_in; ++i) params[off++] = dist(rng);
    for (int i = 0; i < fan_out; ++i) params[off++] = 0.0;  // biases
  }
}

std::vector<double> Mlp::forward(std::span<const double> x, MlpCache* cache) const {
  if (static_cast<int>(x.size()) != sizes.front())
    throw Error(err::kShape, "MLP input size mismatch");

  std::vector<double> a(x.begin(), x.end());
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(a);
  }

  std::size_t off = 0;
  const std::size_t n_layers = sizes.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double* w = params.data() + off;
    const double* b = w + static_cast<std::size_t>(out) * in;
    std::vector<double> z(out);
    for (int i = 0; i < out; ++i) {
      const double* row = w + static_cast<std::size_t>(i) * in;
      double acc = b[i];
      for (int j = 0; j < in; ++j) acc += row[j] * a[j];
      z[i] = acc;
    }
    if (l + 1 < n_layers)
      for (double& v : z) v = elu(v);
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
    off += static_cast<std::size_t>(out) * in + out;
  }
  return a;
}

void Mlp::backward(const MlpCache& cache, std::span<const double> dy,
                   std::vector<double>& grad, std::vector<double>* dx) const {
  const std::size_t n_layers = sizes.size() - 1;
  if (cache.activations.size() != n_layers + 1)
    throw Error(err::kShape, "MLP backward called without a matching forward cache");
  if (grad.size() != params.size()) grad.assign(params.size(), 0.0);

  // Offsets of each layer's parameter block.
  std::vector<std::size_t> offsets(n_layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  }

  std::vector<double> delta(dy.begin(), dy.end());
  for (std::size_t li = n_layers; li-- > 0;) {
    const int in = sizes[li];
    const int out = sizes[li + 1];
    const std::vector<double>& a_in = cache.activations[li];
    const double* w = params.data() + offsets[li];
    double* gw = grad.data() + offsets[li];
    double* gb = gw + static_cast<std::size_t>(out) * in;

    for (int i = 0; i < out; ++i) {
      const double di = delta[i];
      double* grow = gw + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) grow[j] += di * a_in[j];
      gb[i] += di;
    }

    const bool need_input_grad = li > 0 || dx != nullptr;
    if (!need_input_grad) break;

    std::vector<double> prev(in, 0.0);
    for (int i = 0; i < out; ++i) {
      const double di = delta[i];
      const double* row = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) prev[j] += di * row[j];
    }
    if (li > 0) {
      // Chain through the ELU of the layer below (its post-activation is a_in).
      for (int j = 0; j < in; ++j) prev[j] *= elu_grad_from_output(a_in[j]);
    }
    delta = std::move(prev);
  }
  if (dx) *dx = std::move(delta);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace pbp
