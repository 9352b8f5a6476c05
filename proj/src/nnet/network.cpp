// nnet/network.cpp

// Copyright 2026  Cantus Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cantus/network.h"

#include <cmath>
#include <numbers>
#include <random>

#include "cantus/kernels.h"

namespace cantus {

Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::Linear;
  if (s == "relu") return Activation::ReLU;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation: " + s);
}

std::string activation_to_string(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
  }
  return "linear";
}

namespace {

inline double act(Activation a, double x) {
  switch (a) {
    case Activation::Linear: return x;
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Tanh: return std::tanh(x);
  }
  return x;
}

inline double act_deriv(Activation a, double pre) {
  switch (a) {
    case Activation::Linear: return 1.0;
    case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: {
      double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
    case Activation::Tanh: {
      double t = std::tanh(pre);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

}  // namespace

void NetworkConfig::validate() const {
  if (input_dim < 0 || output_dim <= 0)
    throw ConfigError("network: bad input/output dimensions");
  for (int w : hidden_widths) {
    if (w <= 0) throw ConfigError("network: hidden width must be positive");
  }
  if (skip_layer >= static_cast<int>(hidden_widths.size()))
    throw ConfigError("network: skip_layer must index a hidden layer");
  if (skip_layer < -1) throw ConfigError("network: bad skip_layer");
}

int NetworkConfig::layer_input_dim(int l) const {
  int base = (l == 0) ? input_dim : hidden_widths[l - 1];
  if (l == skip_layer && l < static_cast<int>(hidden_widths.size())) base += 1;
  return base;
}

Network Network::create(const NetworkConfig& cfg) {
  cfg.validate();
  Network net;
  net.cfg = cfg;
  const int L = cfg.num_layers();
  net.layers.resize(L);
  for (int l = 0; l < L; ++l) {
    int in = cfg.layer_input_dim(l);
    int out = (l < L - 1) ? cfg.hidden_widths[l] : cfg.output_dim;
    net.layers[l].w = Matrix(out, in);
    net.layers[l].b.assign(out, 0.0);
  }
  return net;
}

void Network::init_random(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& layer : layers) {
    double s = scale / std::sqrt(static_cast<double>(layer.w.cols ? layer.w.cols : 1));
    for (auto& v : layer.w.data) v = s * u(rng);
    for (auto& v : layer.b) v = 0.0;
  }
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.data.size() + l.b.size();
  return n;
}

Network Network::zeros_like() const {
  Network g;
  g.cfg = cfg;
  g.layers.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    g.layers[l].w = Matrix(layers[l].w.rows, layers[l].w.cols);
    g.layers[l].b.assign(layers[l].b.size(), 0.0);
  }
  return g;
}

void Network::forward(std::span<const double> x, double note_pitch,
                      std::vector<double>& out) const {
  Trace trace;
  forward_trace(x, note_pitch, trace, out);
}

void Network::forward_trace(std::span<const double> x, double note_pitch,
                            Trace& trace, std::vector<double>& out) const {
  if (static_cast<int>(x.size()) != cfg.input_dim)
    throw DataError("network forward: input arity mismatch (got " +
                    std::to_string(x.size()) + ", expected " +
                    std::to_string(cfg.input_dim) + ")");
  const int L = cfg.num_layers();
  trace.inputs.resize(L);
  trace.pre.resize(L);

  std::vector<double> cur(x.begin(), x.end());
  for (int l = 0; l < L; ++l) {
    if (l == cfg.skip_layer) cur.push_back(note_pitch);
    trace.inputs[l] = cur;
    const auto& layer = layers[l];
    std::vector<double>& pre = trace.pre[l];
    pre.assign(layer.w.rows, 0.0);
    kernels::matvec(layer.w.data.data(), cur.data(), pre.data(), layer.w.rows, layer.w.cols);
    for (std::size_t r = 0; r < pre.size(); ++r) pre[r] += layer.b[r];
    if (l < L - 1) {
      cur.assign(pre.size(), 0.0);
      for (std::size_t r = 0; r < pre.size(); ++r) cur[r] = act(cfg.hidden_act, pre[r]);
    } else {
      cur = pre;  // linear output layer
    }
  }
  out = cur;
}

void Network::backward(const Trace& trace, std::span<const double> dloss_dout,
                       Network& grad) const {
  const int L = cfg.num_layers();
  std::vector<double> g(dloss_dout.begin(), dloss_dout.end());
  for (int l = L - 1; l >= 0; --l) {
    const auto& layer = layers[l];
    auto& glayer = grad.layers[l];
    const std::vector<double>& input = trace.inputs[l];
    // dW += g x input^T; db += g
    for (std::size_t r = 0; r < layer.w.rows; ++r) {
      kernels::axpy(g[r], input.data(), glayer.w.row(r), layer.w.cols);
      glayer.b[r] += g[r];
    }
    if (l == 0) break;
    std::vector<double> gin(layer.w.cols, 0.0);
    kernels::matvec_t_acc(layer.w.data.data(), g.data(), gin.data(), layer.w.rows, layer.w.cols);
    // drop the skip slot if this layer's input was pitch-extended
    int prev_width = cfg.hidden_widths[l - 1];
    gin.resize(prev_width);
    for (int r = 0; r < prev_width; ++r) {
      gin[r] *= act_deriv(cfg.hidden_act, trace.pre[l - 1][r]);
    }
    g = std::move(gin);
  }
}

double mdn_nll(double mean, double logvar, double target, double* dmean,
               double* dlogvar) {
  double inv_var = std::exp(-logvar);
  double delta = mean - target;
  double nll = 0.5 * (delta * delta * inv_var + logvar +
                      std::log(2.0 * std::numbers::pi));
  if (dmean) *dmean = delta * inv_var;
  if (dlogvar) *dlogvar = 0.5 * (1.0 - delta * delta * inv_var);
  return nll;
}

}  // namespace cantus
