#pragma once

#include <random>
#include <span>
#include <vector>

namespace pbp {

// Activations recorded by a forward pass, consumed by backward().
struct MlpCache {
  std::vector<std::vector<double>> activations;  // a[0] = input, a[L] = output
};

// Plain fully connected network with ELU hidden units and a linear output
// layer. Parameters are stored flat, layer by layer (W row-major, then bias),
// so the optimizer and the checkpoint writer can treat every head uniformly.
struct Mlp {
  std::vector<int> sizes;      // {in, hidden..., out}
  std::vector<double> params;

  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  static std::size_t param_count(const std::vector<int>& layer_sizes);
  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }

  // Weights ~ N(0, 1/fan_in), biases 0.
  void init(std::mt19937_64& rng);

  std::vector<double> forward(std::span<const double> x, MlpCache* cache = nullptr) const;

  // Accumulates dL/dparams into `grad` (same layout as params); when dx is
  // non-null also writes dL/dinput.
  void backward(const MlpCache& cache, std::span<const double> dy,
                std::vector<double>& grad, std::vector<double>* dx = nullptr) const;
};

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_grad_from_output(double y) { return y > 0.0 ? 1.0 : y + 1.0; }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace pbp
