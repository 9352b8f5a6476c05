// nnet/window.cpp

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

#include "cantus/window.h"

#include <algorithm>
#include <cmath>

namespace cantus {

WindowSet WindowSet::standard() {
  WindowSet s;
  s.windows.push_back({{1.0}, 0});
  s.windows.push_back({{-0.5, 0.0, 0.5}, -1});
  s.windows.push_back({{1.0, -2.0, 1.0}, -1});
  return s;
}

WindowSet WindowSet::static_only() {
  WindowSet s;
  s.windows.push_back({{1.0}, 0});
  return s;
}

int WindowSet::max_halfwidth() const {
  int hw = 0;
  for (const auto& w : windows) {
    hw = std::max(hw, -w.left_offset);
    hw = std::max(hw, w.left_offset + static_cast<int>(w.taps.size()) - 1);
  }
  return hw;
}

bool WindowSet::has_identity_first() const {
  if (windows.empty()) return false;
  const Window& w = windows.front();
  return w.taps.size() == 1 && w.taps[0] == 1.0 && w.left_offset == 0;
}

double& BandedSpd::at(int row, int col) {
  return a[static_cast<std::size_t>(row) * (half_bw + 1) + (col - row + half_bw)];
}

void BandedSpd::cholesky_inplace() {
  const int hb = half_bw;
  const int stride = hb + 1;
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j) * stride + hb];
    int kmin = std::max(0, j - hb);
    for (int k = kmin; k < j; ++k) {
      double l = a[static_cast<std::size_t>(j) * stride + (k - j + hb)];
      d -= l * l;
    }
    if (!(d > 0.0)) {
      throw NumericError("banded Cholesky: non-positive pivot at row " + std::to_string(j));
    }
    d = std::sqrt(d);
    a[static_cast<std::size_t>(j) * stride + hb] = d;
    int imax = std::min(n - 1, j + hb);
    for (int i = j + 1; i <= imax; ++i) {
      double s = a[static_cast<std::size_t>(i) * stride + (j - i + hb)];
      int kmin2 = std::max(0, i - hb);
      for (int k = std::max(kmin2, kmin); k < j; ++k) {
        s -= a[static_cast<std::size_t>(i) * stride + (k - i + hb)] *
             a[static_cast<std::size_t>(j) * stride + (k - j + hb)];
      }
      a[static_cast<std::size_t>(i) * stride + (j - i + hb)] = s / d;
    }
  }
}

void BandedSpd::solve_inplace(double* b) const {
  const int hb = half_bw;
  const int stride = hb + 1;
  // forward: L y = b
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    int kmin = std::max(0, i - hb);
    for (int k = kmin; k < i; ++k) {
      s -= a[static_cast<std::size_t>(i) * stride + (k - i + hb)] * b[k];
    }
    b[i] = s / a[static_cast<std::size_t>(i) * stride + hb];
  }
  // backward: L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    int kmax = std::min(n - 1, i + hb);
    for (int k = i + 1; k <= kmax; ++k) {
      s -= a[static_cast<std::size_t>(k) * stride + (i - k + hb)] * b[k];
    }
    b[i] = s / a[static_cast<std::size_t>(i) * stride + hb];
  }
}

WindowOp::WindowOp(int num_frames, const WindowSet& set)
    : T_(num_frames), W_(set.count()), set_(set) {
  rows_.resize(static_cast<std::size_t>(T_) * W_);
  for (int t = 0; t < T_; ++t) {
    for (int w = 0; w < W_; ++w) {
      const auto& win = set_.windows[w];
      std::vector<RowEntry>& row = rows_[static_cast<std::size_t>(t) * W_ + w];
      for (std::size_t i = 0; i < win.taps.size(); ++i) {
        if (win.taps[i] == 0.0) continue;
        int col = t + win.left_offset + static_cast<int>(i);
        col = std::clamp(col, 0, T_ - 1);  // edge replication
        bool merged = false;
        for (auto& e : row) {
          if (e.col == col) {
            e.coeff += win.taps[i];
            merged = true;
            break;
          }
        }
        if (!merged) row.push_back({col, win.taps[i]});
      }
    }
  }
}

void WindowOp::apply(const double* c, double* o) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double s = 0.0;
    for (const auto& e : rows_[r]) s += e.coeff * c[e.col];
    o[r] = s;
  }
}

void WindowOp::apply_transpose_acc(const double* g_o, double* out_c) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double g = g_o[r];
    if (g == 0.0) continue;
    for (const auto& e : rows_[r]) out_c[e.col] += e.coeff * g;
  }
}

BandedSpd WindowOp::normal_matrix(const double* inv_var) const {
  BandedSpd A(T_, 2 * set_.max_halfwidth());
  for (int t = 0; t < T_; ++t) {
    for (int w = 0; w < W_; ++w) {
      const auto& row = rows_[static_cast<std::size_t>(t) * W_ + w];
      double iv = inv_var[w];
      for (const auto& ei : row) {
        for (const auto& ej : row) {
          if (ei.col >= ej.col) A.at(ei.col, ej.col) += iv * ei.coeff * ej.coeff;
        }
      }
    }
  }
  return A;
}

void WindowOp::weighted_transpose_apply(const double* o, const double* inv_var,
                                        double* rhs) const {
  std::fill(rhs, rhs + T_, 0.0);
  for (int t = 0; t < T_; ++t) {
    for (int w = 0; w < W_; ++w) {
      const auto& row = rows_[static_cast<std::size_t>(t) * W_ + w];
      double g = inv_var[w] * o[static_cast<std::size_t>(t) * W_ + w];
      for (const auto& e : row) rhs[e.col] += e.coeff * g;
    }
  }
}

Matrix mlpg(const Matrix& means, const std::vector<double>& gv,
            const WindowOp& op) {
  const int T = op.frames();
  const int W = op.num_windows();
  if (static_cast<int>(means.rows) != T) throw DataError("mlpg: frame count mismatch");
  if (means.cols != gv.size() || means.cols % W != 0) throw DataError("mlpg: dimension mismatch");
  if (!op.window_set().has_identity_first()) {
    throw NumericError("mlpg: window set lacks the identity static window");
  }
  const int D = static_cast<int>(means.cols) / W;

  Matrix out(T, D);
  std::vector<double> o(static_cast<std::size_t>(T) * W);
  std::vector<double> inv_var(W);
  std::vector<double> rhs(T);
  for (int d = 0; d < D; ++d) {
    for (int w = 0; w < W; ++w) {
      double v = gv[static_cast<std::size_t>(w) * D + d];
      if (!(v > 0.0)) throw NumericError("mlpg: non-positive variance");
      inv_var[w] = 1.0 / v;
    }
    for (int t = 0; t < T; ++t) {
      for (int w = 0; w < W; ++w) {
        o[static_cast<std::size_t>(t) * W + w] = means.at(t, static_cast<std::size_t>(w) * D + d);
      }
    }
    BandedSpd A = op.normal_matrix(inv_var.data());
    op.weighted_transpose_apply(o.data(), inv_var.data(), rhs.data());
    A.cholesky_inplace();
    A.solve_inplace(rhs.data());
    for (int t = 0; t < T; ++t) out.at(t, d) = rhs[t];
  }
  return out;
}

Matrix apply_windows(const Matrix& statics, const WindowOp& op) {
  const int T = op.frames();
  const int W = op.num_windows();
  if (static_cast<int>(statics.rows) != T) throw DataError("apply_windows: frame count mismatch");
  const int D = static_cast<int>(statics.cols);
  Matrix out(T, static_cast<std::size_t>(W) * D);
  std::vector<double> c(T), o(static_cast<std::size_t>(T) * W);
  for (int d = 0; d < D; ++d) {
    for (int t = 0; t < T; ++t) c[t] = statics.at(t, d);
    op.apply(c.data(), o.data());
    for (int t = 0; t < T; ++t) {
      for (int w = 0; w < W; ++w) {
        out.at(t, static_cast<std::size_t>(w) * D + d) = o[static_cast<std::size_t>(t) * W + w];
      }
    }
  }
  return out;
}

}  // namespace cantus
