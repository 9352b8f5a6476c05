// nnet/prior.cpp

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

#include "cantus/prior.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cantus {

std::vector<double> build_weight_vector(const std::vector<NoteSpan>& spans,
                                        int total_frames, double w_max,
                                        int ramp) {
  if (ramp < 1) throw ConfigError("build_weight_vector: ramp must be >= 1");
  std::vector<double> w(total_frames, 0.0);
  for (const auto& span : spans) {
    int len = span.length();
    for (int j = 0; j < len; ++j) {
      double up = static_cast<double>(j) / ramp;
      double down = static_cast<double>(len - 1 - j) / ramp;
      w[span.start_frame + j] = w_max * std::min({1.0, up, down});
    }
  }
  return w;
}

BiasExpansion BiasExpansion::build(const std::vector<NoteSpan>& spans) {
  BiasExpansion e;
  int total = spans.empty() ? 0 : spans.back().end_frame;
  e.mix_.resize(total);

  // bias index per span; -1 for rests
  std::vector<int> idx(spans.size(), -1);
  int next = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    if (!spans[k].is_rest) idx[k] = next++;
  }
  e.num_biases_ = next;
  if (next == 0) return e;

  for (std::size_t k = 0; k < spans.size(); ++k) {
    const NoteSpan& s = spans[k];
    if (!s.is_rest) {
      for (int t = s.start_frame; t < s.end_frame; ++t) {
        e.mix_[t] = {idx[k], -1, 1.0, 0.0};
      }
      continue;
    }
    // rest: find flanking non-rest spans
    int prev = -1, nxt = -1;
    for (int q = static_cast<int>(k) - 1; q >= 0; --q) {
      if (!spans[q].is_rest) { prev = q; break; }
    }
    for (std::size_t q = k + 1; q < spans.size(); ++q) {
      if (!spans[q].is_rest) { nxt = static_cast<int>(q); break; }
    }
    if (prev < 0 && nxt < 0) continue;  // all-rest handled by num_biases_==0
    if (prev < 0) {
      for (int t = s.start_frame; t < s.end_frame; ++t) e.mix_[t] = {idx[nxt], -1, 1.0, 0.0};
    } else if (nxt < 0) {
      for (int t = s.start_frame; t < s.end_frame; ++t) e.mix_[t] = {idx[prev], -1, 1.0, 0.0};
    } else {
      // anchors: last frame of prev non-rest note, first frame of next
      double t0 = spans[prev].end_frame - 1;
      double t1 = spans[nxt].start_frame;
      for (int t = s.start_frame; t < s.end_frame; ++t) {
        double a = (t - t0) / (t1 - t0);
        e.mix_[t] = {idx[prev], idx[nxt], 1.0 - a, a};
      }
    }
  }
  return e;
}

std::vector<double> BiasExpansion::expand(const std::vector<double>& bias) const {
  if (static_cast<int>(bias.size()) != num_biases_)
    throw DataError("BiasExpansion: bias count mismatch");
  std::vector<double> out(mix_.size(), 0.0);
  for (std::size_t t = 0; t < mix_.size(); ++t) {
    const FrameMix& m = mix_[t];
    double v = 0.0;
    if (m.i >= 0) v += m.wi * bias[m.i];
    if (m.j >= 0) v += m.wj * bias[m.j];
    out[t] = v;
  }
  return out;
}

void BiasExpansion::accumulate_adjoint(const double* grad_frames,
                                       double* grad_bias) const {
  for (std::size_t t = 0; t < mix_.size(); ++t) {
    const FrameMix& m = mix_[t];
    if (m.i >= 0) grad_bias[m.i] += m.wi * grad_frames[t];
    if (m.j >= 0) grad_bias[m.j] += m.wj * grad_frames[t];
  }
}

double f0_prior_loss(const std::vector<double>& pred_mu,
                     const std::vector<double>& target_f0,
                     const std::vector<double>& note_pitch,
                     const std::vector<double>* b_expanded, const WindowOp& op,
                     const GlobalVariance& gv_f0, const std::vector<double>& w,
                     double sigma_p, std::vector<double>* grad_mu,
                     std::vector<double>* grad_b_frames) {
  const std::size_t T = pred_mu.size();
  if (target_f0.size() != T || note_pitch.size() != T || w.size() != T ||
      (b_expanded && b_expanded->size() != T) ||
      static_cast<std::size_t>(op.frames()) != T)
    throw DataError("f0_prior_loss: length mismatch");
  const bool prior_on = std::isfinite(sigma_p);
  if (prior_on && !(sigma_p > 0.0))
    throw ConfigError("f0_prior_loss: sigma_p must be positive or infinite");

  // Gaussian term via the shared criterion on pred = p + mu + b vs f0.
  Matrix pred(T, 1), target(T, 1);
  for (std::size_t t = 0; t < T; ++t) {
    pred.at(t, 0) = note_pitch[t] + pred_mu[t] + (b_expanded ? (*b_expanded)[t] : 0.0);
    target.at(t, 0) = target_f0[t];
  }
  Matrix grad_static;
  double loss = loss_static_out_dynamic(pred, target, op, gv_f0,
                                        (grad_mu || grad_b_frames) ? &grad_static : nullptr);
  if (grad_mu) {
    grad_mu->assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) (*grad_mu)[t] = grad_static.at(t, 0);
  }
  if (grad_b_frames) {
    grad_b_frames->assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) (*grad_b_frames)[t] = grad_static.at(t, 0);
  }

  if (prior_on) {
    const double inv_sp2 = 1.0 / (sigma_p * sigma_p);
    const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * sigma_p * sigma_p);
    for (std::size_t t = 0; t < T; ++t) {
      loss += w[t] * (0.5 * pred_mu[t] * pred_mu[t] * inv_sp2 + log_norm);
      if (grad_mu) (*grad_mu)[t] += w[t] * pred_mu[t] * inv_sp2;
    }
  }
  return loss;
}

}  // namespace cantus
