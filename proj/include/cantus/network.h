// cantus/network.h

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

#ifndef CANTUS_NETWORK_H_
#define CANTUS_NETWORK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cantus/common.h"

namespace cantus {

enum class Activation { Linear, ReLU, Sigmoid, Tanh };

Activation activation_from_string(const std::string& s);
std::string activation_to_string(Activation a);

// Feed-forward regression network. An optional skip connection concatenates
// the note pitch (cents) onto the input of one hidden layer so pitch
// information reaches the model directly. Output layer is always linear.
struct NetworkConfig {
  int input_dim = 0;
  std::vector<int> hidden_widths;
  int output_dim = 0;
  Activation hidden_act = Activation::Tanh;
  int skip_layer = -1;  // hidden layer whose input gains the note pitch; -1 = none

  void validate() const;
  // Input arity of layer l (0..hidden_widths.size(); the last is the output layer).
  int layer_input_dim(int l) const;
  int num_layers() const { return static_cast<int>(hidden_widths.size()) + 1; }
};

struct Network {
  struct Layer {
    Matrix w;  // out x in
    std::vector<double> b;
  };

  NetworkConfig cfg;
  std::vector<Layer> layers;

  static Network create(const NetworkConfig& cfg);
  void init_random(std::uint64_t seed, double scale = 0.1);
  std::size_t param_count() const;

  // Per-frame cache for backprop: the (possibly skip-extended) input of each
  // layer and each layer's pre-activation.
  struct Trace {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> pre;
  };

  void forward(std::span<const double> x, double note_pitch,
               std::vector<double>& out) const;
  void forward_trace(std::span<const double> x, double note_pitch, Trace& trace,
                     std::vector<double>& out) const;
  // Accumulates parameter gradients into `grad` (same shapes as *this).
  void backward(const Trace& trace, std::span<const double> dloss_dout,
                Network& grad) const;

  Network zeros_like() const;
};

// Single-Gaussian MDN head convention: output[0] = mean,
// output[1] = log variance (exponential link keeps the variance positive).
// Returns the NLL with constants; writes dNLL/dmean, dNLL/dlogvar.
double mdn_nll(double mean, double logvar, double target, double* dmean,
               double* dlogvar);

}  // namespace cantus

#endif  // CANTUS_NETWORK_H_
