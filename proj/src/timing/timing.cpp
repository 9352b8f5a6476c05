// timing/timing.cpp

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

#include "cantus/timing.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

namespace cantus {

ReferencePhonemeMap reference_phonemes(const Score& score) {
  ReferencePhonemeMap map;
  map.ref_index.reserve(score.notes.size());
  for (const auto& note : score.notes) {
    int ref = 0;  // silence segment for rests, fallback first phoneme otherwise
    if (!note.is_rest()) {
      for (std::size_t k = 0; k < note.phonemes.size(); ++k) {
        if (note.phonemes[k].cls == PhonemeClass::Vowel) {
          ref = static_cast<int>(k);
          break;
        }
      }
    }
    map.ref_index.push_back(ref);
  }
  return map;
}

TimeLagVector compute_time_lag_targets(const Score& score,
                                       const PhonemeAlignment& alignment,
                                       const ReferencePhonemeMap& refs) {
  const auto ranges = map_alignment_to_score(score, alignment);
  if (refs.ref_index.size() != score.notes.size())
    throw DataError("compute_time_lag_targets: reference map size mismatch");

  TimeLagVector lags;
  lags.lag_frames.reserve(score.notes.size());
  int score_start = 0;
  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    int seg = ranges[n].first + refs.ref_index[n];
    if (seg >= ranges[n].second)
      throw DataError("compute_time_lag_targets: reference phoneme out of range at note " +
                      std::to_string(n));
    double lag = alignment.segments[seg].start_frame - score_start;
    lags.lag_frames.push_back(n == 0 ? 0.0 : lag);
    score_start += score.notes[n].length_frames;
  }
  return lags;
}

AdjustedNoteLengths adjust_note_lengths(const std::vector<int>& lengths,
                                        const TimeLagVector& lags,
                                        RepairMode mode) {
  const std::size_t N = lengths.size();
  if (lags.lag_frames.size() != N)
    throw DataError("adjust_note_lengths: lag/length count mismatch");
  if (N == 0) return {};
  if (lags.lag_frames[0] != 0.0)
    throw DataError("adjust_note_lengths: first time-lag must be zero");
  for (int L : lengths) {
    if (L <= 0) throw DataError("adjust_note_lengths: non-positive note length");
  }

  AdjustedNoteLengths adj;
  adj.frames.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    double next = (n + 1 < N) ? lags.lag_frames[n + 1] : 0.0;
    adj.frames[n] = lengths[n] - lags.lag_frames[n] + next;
  }

  std::vector<std::size_t> bad;
  for (std::size_t n = 0; n < N; ++n) {
    if (adj.frames[n] <= 0.0) bad.push_back(n);
  }
  if (bad.empty()) return adj;

  if (mode == RepairMode::HardError) {
    std::string which;
    for (std::size_t n : bad) which += (which.empty() ? "" : ", ") + std::to_string(n);
    throw DataError("infeasible time-lag: non-positive adjusted length at notes " + which);
  }

  // Repair: clamp to one frame, donating the shortfall from the largest
  // adjusted lengths so the total stays put.
  adj.repaired = true;
  for (std::size_t n : bad) {
    double need = 1.0 - adj.frames[n];
    adj.frames[n] = 1.0;
    while (need > 0.0) {
      std::size_t donor = N;
      double best = 1.0;
      for (std::size_t q = 0; q < N; ++q) {
        if (q != n && adj.frames[q] > best) {
          best = adj.frames[q];
          donor = q;
        }
      }
      if (donor == N)
        throw DataError("infeasible time-lag: cannot repair, no donor frames left");
      double take = std::min(need, adj.frames[donor] - 1.0);
      adj.frames[donor] -= take;
      need -= take;
    }
  }
  return adj;
}

std::vector<int> integerize_durations(const std::vector<double>& exact,
                                      int target_total) {
  const std::size_t K = exact.size();
  if (K == 0) throw DataError("integerize_durations: empty allocation");
  if (target_total < static_cast<int>(K))
    throw DataError("integerize_durations: cannot fit " + std::to_string(K) +
                    " phonemes into " + std::to_string(target_total) + " frames");

  std::vector<int> out(K);
  std::vector<double> rem(K);
  int assigned = 0;
  for (std::size_t k = 0; k < K; ++k) {
    double f = std::floor(exact[k]);
    out[k] = static_cast<int>(f);
    rem[k] = exact[k] - f;
    assigned += out[k];
  }

  int missing = target_total - assigned;
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  // largest remainder first; ties favor the later phoneme
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rem[a] != rem[b]) return rem[a] > rem[b];
    return a > b;
  });
  for (int i = 0; i < missing; ++i) out[order[i % K]] += 1;
  for (int i = missing; i < 0; ++i) {
    // target smaller than the floored sum (possible only via repair modes);
    // take back from the smallest remainders
    out[order[K - 1 - ((-i - 1) % K)]] -= 1;
  }

  // minimum one frame, donated from the largest phoneme (earlier one on ties)
  for (std::size_t k = 0; k < K; ++k) {
    while (out[k] < 1) {
      std::size_t donor = K;
      int best = 1;
      for (std::size_t q = 0; q < K; ++q) {
        if (out[q] > best) {
          best = out[q];
          donor = q;
        }
      }
      if (donor == K) throw DataError("integerize_durations: no donor frames left");
      out[donor] -= 1;
      out[k] += 1;
    }
  }
  return out;
}

std::vector<double> allocate_uniform_real(double l_hat, const std::vector<double>& mu) {
  if (mu.empty()) throw DataError("allocate_uniform: no phonemes");
  if (!(l_hat > 0.0)) throw DataError("allocate_uniform: non-positive note length");
  double total = 0.0;
  for (double m : mu) {
    if (m < 0.0) throw DataError("allocate_uniform: negative duration mean");
    total += m;
  }
  if (total <= 0.0) throw DataError("allocate_uniform: duration means sum to zero");
  std::vector<double> d(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) d[k] = l_hat * mu[k] / total;
  return d;
}

AllocationResult allocate_uniform(double l_hat, const std::vector<double>& mu) {
  AllocationResult res;
  res.frames = integerize_durations(allocate_uniform_real(l_hat, mu),
                                    static_cast<int>(std::llround(l_hat)));
  return res;
}

std::vector<double> allocate_ml_real(double l_hat, const DurationDistribution& dist,
                                     RepairMode mode, bool* repaired) {
  const std::size_t K = dist.mean.size();
  if (K == 0 || dist.var.size() != K)
    throw DataError("allocate_ml: bad duration distribution");
  for (double v : dist.var) {
    if (!(v > 0.0)) throw DataError("allocate_ml: non-positive variance");
  }
  if (repaired) *repaired = false;

  std::vector<double> d(K);
  std::vector<bool> clamped(K, false);
  const double min_dur = 1.0;

  for (;;) {
    double free_mu = 0.0, free_var = 0.0, budget = l_hat;
    for (std::size_t k = 0; k < K; ++k) {
      if (clamped[k]) budget -= min_dur;
      else {
        free_mu += dist.mean[k];
        free_var += dist.var[k];
      }
    }
    double rho = (budget - free_mu) / free_var;
    bool violated = false;
    for (std::size_t k = 0; k < K; ++k) {
      if (clamped[k]) {
        d[k] = min_dur;
        continue;
      }
      d[k] = dist.mean[k] + rho * dist.var[k];
      if (d[k] <= 0.0) violated = true;
    }
    if (!violated) return d;

    if (mode == RepairMode::HardError) {
      std::string which;
      for (std::size_t k = 0; k < K; ++k) {
        if (!clamped[k] && d[k] <= 0.0) which += (which.empty() ? "" : ", ") + std::to_string(k);
      }
      throw DataError("allocate_ml: non-positive duration for phonemes " + which);
    }
    if (repaired) *repaired = true;
    std::size_t n_clamped = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!clamped[k] && d[k] <= 0.0) clamped[k] = true;
      n_clamped += clamped[k];
    }
    if (n_clamped == K || l_hat < min_dur * static_cast<double>(K))
      throw DataError("allocate_ml: note too short to repair");
  }
}

AllocationResult allocate_ml(double l_hat, const DurationDistribution& dist,
                             RepairMode mode) {
  AllocationResult res;
  std::vector<double> d = allocate_ml_real(l_hat, dist, mode, &res.repaired);
  res.frames = integerize_durations(d, static_cast<int>(std::llround(l_hat)));
  return res;
}

TimeLagVector predict_time_lags(const Matrix& note_features, const Network& net) {
  if (net.cfg.output_dim != 1)
    throw ConfigError("predict_time_lags: time-lag model must have one output");
  TimeLagVector lags;
  lags.lag_frames.resize(note_features.rows, 0.0);
  std::vector<double> out;
  for (std::size_t n = 0; n < note_features.rows; ++n) {
    net.forward(std::span(note_features.row(n), note_features.cols), 0.0, out);
    if (!std::isfinite(out[0])) throw NumericError("predict_time_lags: non-finite output");
    lags.lag_frames[n] = out[0];
  }
  if (!lags.lag_frames.empty()) lags.lag_frames[0] = 0.0;
  return lags;
}

TimeLagVector round_lags(const TimeLagVector& lags) {
  TimeLagVector out;
  out.lag_frames.reserve(lags.lag_frames.size());
  for (double g : lags.lag_frames) out.lag_frames.push_back(static_cast<double>(std::llround(g)));
  return out;
}

DurationDistribution predict_durations(const Matrix& phoneme_features,
                                       const Network& net) {
  if (net.cfg.output_dim != 2)
    throw ConfigError("predict_durations: MDN head must have two outputs");
  DurationDistribution dist;
  dist.mean.resize(phoneme_features.rows);
  dist.var.resize(phoneme_features.rows);
  std::vector<double> out;
  for (std::size_t k = 0; k < phoneme_features.rows; ++k) {
    net.forward(std::span(phoneme_features.row(k), phoneme_features.cols), 0.0, out);
    if (!std::isfinite(out[0]) || !std::isfinite(out[1]))
      throw NumericError("predict_durations: non-finite output");
    dist.mean[k] = out[0];
    dist.var[k] = std::exp(std::clamp(out[1], -20.0, 20.0));
  }
  return dist;
}

}  // namespace cantus
