// nnet/losses.cpp

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

#include "cantus/losses.h"

#include <cmath>
#include <numbers>

#include "cantus/kernels.h"

namespace cantus {

double gaussian_nll(const Matrix& pred, const Matrix& target,
                    const GlobalVariance& gv, Matrix* grad) {
  if (pred.rows != target.rows || pred.cols != target.cols)
    throw DataError("gaussian_nll: shape mismatch");
  if (gv.var.size() != pred.cols)
    throw DataError("gaussian_nll: variance dimension mismatch");
  const std::size_t T = pred.rows, D = pred.cols;
  if (grad) *grad = Matrix(T, D);

  double loss = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    double v = gv.var[d];
    if (!(v > 0.0)) throw NumericError("gaussian_nll: non-positive variance");
    double inv_v = 1.0 / v;
    double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * v);
    double ssq = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      double delta = pred.at(t, d) - target.at(t, d);
      ssq += delta * delta;
      if (grad) grad->at(t, d) = delta * inv_v;
    }
    loss += 0.5 * inv_v * ssq + log_norm * static_cast<double>(T);
  }
  return loss;
}

double loss_static(const Matrix& pred_mean, const Matrix& target,
                   const GlobalVariance& gv, Matrix* grad) {
  return gaussian_nll(pred_mean, target, gv, grad);
}

double loss_dynamic_target(const Matrix& pred_mean_with_deltas,
                           const Matrix& target_with_deltas,
                           const GlobalVariance& gv, Matrix* grad) {
  return gaussian_nll(pred_mean_with_deltas, target_with_deltas, gv, grad);
}

double loss_static_out_dynamic(const Matrix& pred_static_mean,
                               const Matrix& target_static, const WindowOp& op,
                               const GlobalVariance& gv, Matrix* grad) {
  const int T = op.frames();
  const int W = op.num_windows();
  if (static_cast<int>(pred_static_mean.rows) != T ||
      pred_static_mean.rows != target_static.rows ||
      pred_static_mean.cols != target_static.cols)
    throw DataError("loss_static_out_dynamic: shape mismatch");
  const std::size_t D = pred_static_mean.cols;
  if (gv.var.size() != D * W)
    throw DataError("loss_static_out_dynamic: variance dimension mismatch");
  if (grad) *grad = Matrix(T, D);

  std::vector<double> c(T), ct(T), m(static_cast<std::size_t>(T) * W),
      o(static_cast<std::size_t>(T) * W), g_o(static_cast<std::size_t>(T) * W),
      g_c(T);
  double loss = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    for (int t = 0; t < T; ++t) {
      c[t] = pred_static_mean.at(t, d);
      ct[t] = target_static.at(t, d);
    }
    op.apply(c.data(), m.data());
    op.apply(ct.data(), o.data());
    for (int w = 0; w < W; ++w) {
      double v = gv.var[static_cast<std::size_t>(w) * D + d];
      if (!(v > 0.0)) throw NumericError("loss_static_out_dynamic: non-positive variance");
      double inv_v = 1.0 / v;
      double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * v);
      double ssq = 0.0;
      for (int t = 0; t < T; ++t) {
        std::size_t i = static_cast<std::size_t>(t) * W + w;
        double delta = m[i] - o[i];
        ssq += delta * delta;
        g_o[i] = delta * inv_v;
      }
      loss += 0.5 * inv_v * ssq + log_norm * T;
    }
    if (grad) {
      std::fill(g_c.begin(), g_c.end(), 0.0);
      op.apply_transpose_acc(g_o.data(), g_c.data());
      for (int t = 0; t < T; ++t) grad->at(t, d) = g_c[t];
    }
  }
  return loss;
}

GlobalVariance estimate_global_variance(const std::vector<const Matrix*>& targets) {
  if (targets.empty() || targets[0]->cols == 0)
    return GlobalVariance{{}};
  const std::size_t D = targets[0]->cols;
  std::vector<double> sum(D, 0.0), sumsq(D, 0.0);
  std::size_t n = 0;
  for (const Matrix* m : targets) {
    if (m->cols != D) throw DataError("estimate_global_variance: column mismatch");
    for (std::size_t t = 0; t < m->rows; ++t) {
      for (std::size_t d = 0; d < D; ++d) {
        double x = m->at(t, d);
        sum[d] += x;
        sumsq[d] += x * x;
      }
    }
    n += m->rows;
  }
  GlobalVariance gv;
  gv.var.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    double mean = sum[d] / n;
    double v = sumsq[d] / n - mean * mean;
    gv.var[d] = std::max(v, GlobalVariance::kFloor);
  }
  return gv;
}

}  // namespace cantus
