// Copyright 2026 The adaptkf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adaptkf/rng.hpp"

namespace adaptkf::nn {

/// Dense feed-forward network: ReLU on hidden layers, identity on the output.
/// All parameters live in one flat buffer, layer by layer, each layer stored
/// as its row-major weight matrix (out x in) followed by its bias vector.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialized network with the given layer widths (input first).
  explicit Mlp(std::vector<int> layer_dims);

  /// He-uniform hidden layers, Glorot-uniform output layer, zero biases.
  static Mlp initialized(std::vector<int> layer_dims, RandomStream& rng);

  const std::vector<int>& layer_dims() const { return dims_; }
  int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  std::span<double> weights(int layer);
  std::span<const double> weights(int layer) const;
  std::span<double> biases(int layer);
  std::span<const double> biases(int layer) const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  /// Positions of a layer's weights and biases inside params().
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const {
    return offsets_[layer] + static_cast<std::size_t>(dims_[layer + 1]) * dims_[layer];
  }

  bool all_finite() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Per-layer values kept for the backward pass. inputs[l] feeds layer l;
/// pre_activations[l] is W_l * inputs[l] + b_l.
struct ForwardCache {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre_activations;
};

struct ForwardPass {
  std::vector<double> output;
  ForwardCache cache;
};

/// Gradients in the parameter layout of the network plus the input gradient.
struct Gradients {
  std::vector<double> params;
  std::vector<double> input;
};

ForwardPass forward(const Mlp& net, std::span<const double> x);
/// Output only, no cache.
std::vector<double> evaluate(const Mlp& net, std::span<const double> x);

/// Reverse-mode gradient of dot(output, grad_out).
Gradients backward(const Mlp& net, const ForwardCache& cache, std::span<const double> grad_out);

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);
/// -sum p ln p with 0 ln 0 = 0.
double entropy(std::span<const double> probs);

struct AdamState {
  long step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(const Mlp& net, double lr);

/// One bias-corrected Adam step on the net's parameters.
void adam_step(Mlp& net, std::span<const double> grads, AdamState& state);

/// target <- tau * online + (1 - tau) * target
void polyak_update(Mlp& target, const Mlp& online, double tau);

}  // namespace adaptkf::nn
