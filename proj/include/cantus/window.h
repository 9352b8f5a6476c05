// cantus/window.h

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

#ifndef CANTUS_WINDOW_H_
#define CANTUS_WINDOW_H_

#include <cstddef>
#include <vector>

#include "cantus/common.h"

namespace cantus {

// A set of finite-impulse windows that extend a static sequence c to a
// stacked static+dynamic sequence o. The default set is
//   static   [1]            (offset 0)
//   velocity [-0.5, 0, 0.5] (offsets -1..1)
//   accel    [1, -2, 1]     (offsets -1..1)
struct WindowSet {
  struct Window {
    std::vector<double> taps;
    int left_offset = 0;  // tap i applies at frame t + left_offset + i
  };
  std::vector<Window> windows;

  static WindowSet standard();     // static + velocity + acceleration
  static WindowSet static_only();  // identity

  int count() const { return static_cast<int>(windows.size()); }
  int max_halfwidth() const;
  bool has_identity_first() const;
};

// Symmetric positive-definite banded matrix, lower storage.
// a[r * (half_bw + 1) + k] holds A[r][r - half_bw + k], k = 0..half_bw
// (entries left of the band edge are kept at zero for short rows).
struct BandedSpd {
  int n = 0;
  int half_bw = 0;
  std::vector<double> a;

  BandedSpd() = default;
  BandedSpd(int n_, int hbw) : n(n_), half_bw(hbw), a(static_cast<std::size_t>(n_) * (hbw + 1), 0.0) {}

  double& at(int row, int col);  // requires row >= col, row - col <= half_bw

  // In-place Cholesky A = L L^T (L in the same banded storage).
  // Throws NumericError on a non-positive pivot.
  void cholesky_inplace();
  // Solves A x = b given cholesky_inplace() has run; b is overwritten by x.
  void solve_inplace(double* b) const;
};

// W as a banded linear operator for a fixed frame count, with
// edge-replicated boundary handling: out-of-range taps are clamped to the
// first/last frame and their coefficients merged. Losses and MLPG share
// this one operator so training and generation see the same W.
class WindowOp {
 public:
  WindowOp(int num_frames, const WindowSet& set);

  int frames() const { return T_; }
  int num_windows() const { return W_; }
  const WindowSet& window_set() const { return set_; }

  // o layout: o[t * W + w]. c has T entries.
  void apply(const double* c, double* o) const;
  // out_c += W^T g_o, g_o in the o layout above.
  void apply_transpose_acc(const double* g_o, double* out_c) const;

  // Normal system for one dimension: A = W^T diag(inv_var) W and
  // rhs = W^T diag(inv_var) o, where inv_var[w] is the inverse variance of
  // window w (replicated across frames) and o is in the o layout.
  BandedSpd normal_matrix(const double* inv_var) const;
  void weighted_transpose_apply(const double* o, const double* inv_var,
                                double* rhs) const;

 private:
  struct RowEntry {
    int col;
    double coeff;
  };
  int T_;
  int W_;
  WindowSet set_;
  // row_entries_[t * W + w] -> merged, clamped coefficients
  std::vector<std::vector<RowEntry>> rows_;
};

// Maximum-likelihood parameter generation: returns the static sequence c
// maximizing N(W c | means, diag(gv)) per dimension.
// means: T x (W*D) matrix in window-major blocks [w0 dims | w1 dims | ...];
// gv: length W*D. Requires the first window to be the identity (this keeps
// the normal matrix positive definite).
Matrix mlpg(const Matrix& means, const std::vector<double>& gv,
            const WindowOp& op);

// Extends a static T x D matrix to T x (W*D) with the operator above
// (used for building dynamic-feature targets).
Matrix apply_windows(const Matrix& statics, const WindowOp& op);

}  // namespace cantus

#endif  // CANTUS_WINDOW_H_
