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

#include "adaptkf/nn.hpp"

#include <algorithm>
#include <cmath>

#include "adaptkf/kernels.hpp"
#include "adaptkf/numerics.hpp"

namespace adaptkf::nn {

Mlp::Mlp(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) throw Error(ErrorCode::InvalidArgument, "network needs >= 2 layer widths");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] <= 0 || dims_[l + 1] <= 0) {
      throw Error(ErrorCode::InvalidArgument, "layer widths must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]) * (dims_[l] + 1);
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::initialized(std::vector<int> layer_dims, RandomStream& rng) {
  Mlp net(std::move(layer_dims));
  for (int l = 0; l < net.num_layers(); ++l) {
    const double fan_in = net.dims_[l];
    const double fan_out = net.dims_[l + 1];
    const bool output_layer = l + 1 == net.num_layers();
    const double limit =
        output_layer ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
    for (double& w : net.weights(l)) w = limit * (2.0 * rng.uniform() - 1.0);
  }
  return net;
}

std::span<double> Mlp::weights(int layer) {
  return {params_.data() + weight_offset(layer),
          static_cast<std::size_t>(dims_[layer + 1]) * dims_[layer]};
}
std::span<const double> Mlp::weights(int layer) const {
  return {params_.data() + weight_offset(layer),
          static_cast<std::size_t>(dims_[layer + 1]) * dims_[layer]};
}
std::span<double> Mlp::biases(int layer) {
  return {params_.data() + bias_offset(layer), static_cast<std::size_t>(dims_[layer + 1])};
}
std::span<const double> Mlp::biases(int layer) const {
  return {params_.data() + bias_offset(layer), static_cast<std::size_t>(dims_[layer + 1])};
}

bool Mlp::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double p) { return std::isfinite(p); });
}

ForwardPass forward(const Mlp& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim()) {
    throw Error(ErrorCode::InvalidArgument, "input width does not match the network");
  }
  const auto& k = kernels::active();
  ForwardPass pass;
  pass.cache.inputs.reserve(net.num_layers());
  pass.cache.pre_activations.reserve(net.num_layers());

  std::vector<double> a(x.begin(), x.end());
  for (int l = 0; l < net.num_layers(); ++l) {
    const std::size_t rows = net.layer_dims()[l + 1];
    const std::size_t cols = net.layer_dims()[l];
    std::vector<double> z(rows);
    k.affine(net.weights(l).data(), net.biases(l).data(), a.data(), z.data(), rows, cols);
    pass.cache.inputs.push_back(std::move(a));
    a = z;
    if (l + 1 < net.num_layers()) {
      for (double& v : a) v = v > 0.0 ? v : 0.0;
    }
    pass.cache.pre_activations.push_back(std::move(z));
  }
  pass.output = std::move(a);
  return pass;
}

std::vector<double> evaluate(const Mlp& net, std::span<const double> x) {
  return forward(net, x).output;
}

Gradients backward(const Mlp& net, const ForwardCache& cache, std::span<const double> grad_out) {
  const auto& k = kernels::active();
  Gradients grads;
  grads.params.assign(net.num_params(), 0.0);

  std::vector<double> g(grad_out.begin(), grad_out.end());
  for (int l = net.num_layers() - 1; l >= 0; --l) {
    const std::size_t rows = net.layer_dims()[l + 1];
    const std::size_t cols = net.layer_dims()[l];
    if (l + 1 < net.num_layers()) {
      const auto& pre = cache.pre_activations[l];
      for (std::size_t i = 0; i < rows; ++i) {
        if (!(pre[i] > 0.0)) g[i] = 0.0;
      }
    }
    const std::size_t w_off = net.weight_offset(l);
    const std::size_t b_off = net.bias_offset(l);
    k.outer_accumulate(g.data(), cache.inputs[l].data(), grads.params.data() + w_off, rows, cols);
    std::copy(g.begin(), g.end(), grads.params.begin() + static_cast<std::ptrdiff_t>(b_off));
    std::vector<double> prev(cols);
    k.affine_transpose(net.weights(l).data(), g.data(), prev.data(), rows, cols);
    g = std::move(prev);
  }
  grads.input = std::move(g);
  return grads;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

AdamState make_adam(const Mlp& net, double lr) {
  AdamState s;
  s.m.assign(net.num_params(), 0.0);
  s.v.assign(net.num_params(), 0.0);
  s.lr = lr;
  return s;
}

void adam_step(Mlp& net, std::span<const double> grads, AdamState& state) {
  if (grads.size() != net.num_params() || state.m.size() != net.num_params() ||
      state.v.size() != net.num_params()) {
    throw Error(ErrorCode::InvalidArgument, "Adam shapes do not match the network");
  }
  ++state.step;
  const kernels::AdamCoefficients c{
      state.lr,
      state.beta1,
      state.beta2,
      state.eps,
      1.0 - std::pow(state.beta1, static_cast<double>(state.step)),
      1.0 - std::pow(state.beta2, static_cast<double>(state.step)),
  };
  kernels::active().adam(net.params().data(), grads.data(), state.m.data(), state.v.data(),
                         net.num_params(), c);
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (target.layer_dims() != online.layer_dims()) {
    throw Error(ErrorCode::InvalidArgument, "Polyak update between different shapes");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tau must lie in (0, 1]");
  }
  kernels::active().polyak(target.params().data(), online.params().data(), target.num_params(),
                           tau);
}

}  // namespace adaptkf::nn
