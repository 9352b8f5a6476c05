// cantus/losses.h

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

#ifndef CANTUS_LOSSES_H_
#define CANTUS_LOSSES_H_

#include <vector>

#include "cantus/common.h"
#include "cantus/window.h"

namespace cantus {

// Per-dimension globally tied variances of the regression targets.
// Estimated empirically and floored so downstream systems stay SPD.
struct GlobalVariance {
  std::vector<double> var;
  static constexpr double kFloor = 1e-6;
};

// Diagonal Gaussian negative log-likelihood including the normalization
// constant, summed over a T x D matrix. If grad is non-null it receives
// dL/dpred (same shape). All training criteria below are minimized NLLs of
// the likelihoods they are named after.
double gaussian_nll(const Matrix& pred, const Matrix& target,
                    const GlobalVariance& gv, Matrix* grad);

// Static criterion: NLL of N(target | pred, diag(gv)), statics only.
double loss_static(const Matrix& pred_mean, const Matrix& target,
                   const GlobalVariance& gv, Matrix* grad);

// Dynamic-target criterion: the same NLL where both pred and target carry
// window-extended (static+dynamic) dimensions.
double loss_dynamic_target(const Matrix& pred_mean_with_deltas,
                           const Matrix& target_with_deltas,
                           const GlobalVariance& gv, Matrix* grad);

// Static-output / dynamic-loss criterion: NLL of N(W target | W pred, gv)
// where pred and target are static and gv covers the windowed dimensions.
// grad (if non-null) receives dL/dpred, T x D.
double loss_static_out_dynamic(const Matrix& pred_static_mean,
                               const Matrix& target_static, const WindowOp& op,
                               const GlobalVariance& gv, Matrix* grad);

// Empirical per-dimension variance of a stack of target matrices, floored.
GlobalVariance estimate_global_variance(const std::vector<const Matrix*>& targets);

}  // namespace cantus

#endif  // CANTUS_LOSSES_H_
