// cantus/prior.h

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

#ifndef CANTUS_PRIOR_H_
#define CANTUS_PRIOR_H_

#include <limits>
#include <vector>

#include "cantus/common.h"
#include "cantus/losses.h"
#include "cantus/window.h"

namespace cantus {

// Zero-mean Gaussian prior over the pitch residual. sigma_p = infinity
// disables the prior (the loss then reduces to the plain criterion).
struct PriorConfig {
  double sigma_p = std::numeric_limits<double>::infinity();
  double w_max = 0.5;
  int ramp = 25;
  bool enabled() const { return std::isfinite(sigma_p); }
};

// Per-frame prior weights: 0 at every span boundary, rising linearly to
// w_max over `ramp` frames from each side (clipped triangular profile for
// spans shorter than 2*ramp).
std::vector<double> build_weight_vector(const std::vector<NoteSpan>& spans,
                                        int total_frames, double w_max = 0.5,
                                        int ramp = 25);

// Linear expansion of per-note bias scalars to a frame sequence: constant
// over each non-rest note, linearly interpolated across interior rests,
// held at the nearest value over edge rests. The adjoint routes frame
// gradients back to the note parameters.
class BiasExpansion {
 public:
  static BiasExpansion build(const std::vector<NoteSpan>& spans);

  int num_biases() const { return num_biases_; }
  int frames() const { return static_cast<int>(mix_.size()); }
  std::vector<double> expand(const std::vector<double>& bias) const;
  void accumulate_adjoint(const double* grad_frames, double* grad_bias) const;

 private:
  struct FrameMix {
    int i = -1, j = -1;
    double wi = 0.0, wj = 0.0;
  };
  std::vector<FrameMix> mix_;
  int num_biases_ = 0;
};

// F0-stream training objective: NLL of N(W f0 | W (p + mu + b), gv) plus
// the weighted prior NLL sum_t w[t] * (mu[t]^2 / (2 sigma_p^2) + const).
// b_expanded may be null (bias-free modes). grad_mu / grad_b_frames may be
// null; grad_b_frames receives only the Gaussian-term gradient, to be
// contracted through BiasExpansion::accumulate_adjoint by the caller.
double f0_prior_loss(const std::vector<double>& pred_mu,
                     const std::vector<double>& target_f0,
                     const std::vector<double>& note_pitch,
                     const std::vector<double>* b_expanded, const WindowOp& op,
                     const GlobalVariance& gv_f0, const std::vector<double>& w,
                     double sigma_p, std::vector<double>* grad_mu,
                     std::vector<double>* grad_b_frames);

}  // namespace cantus

#endif  // CANTUS_PRIOR_H_
