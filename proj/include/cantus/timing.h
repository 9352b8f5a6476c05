// cantus/timing.h

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

#ifndef CANTUS_TIMING_H_
#define CANTUS_TIMING_H_

#include <vector>

#include "cantus/alignment.h"
#include "cantus/common.h"
#include "cantus/network.h"
#include "cantus/score.h"

namespace cantus {

// Per-note start-timing offsets in frames; positive means the reference
// phoneme starts after the score's note onset. The first entry is always 0.
struct TimeLagVector {
  std::vector<double> lag_frames;
};

// Per-note adjusted lengths after shifting boundaries by the time lags.
// The total always equals the original total.
struct AdjustedNoteLengths {
  std::vector<double> frames;
  bool repaired = false;
};

// Phoneme duration distribution of one note (single-Gaussian MDN output).
struct DurationDistribution {
  std::vector<double> mean;
  std::vector<double> var;
};

// Index of each note's reference phoneme: the first vowel, the silence for
// rests, or the first phoneme when the note has no vowel.
struct ReferencePhonemeMap {
  std::vector<int> ref_index;
};

enum class RepairMode { HardError, Repair };

ReferencePhonemeMap reference_phonemes(const Score& score);

// Training targets: aligned reference-phoneme start minus score note start,
// with entry 0 forced to zero.
TimeLagVector compute_time_lag_targets(const Score& score,
                                       const PhonemeAlignment& alignment,
                                       const ReferencePhonemeMap& refs);

// l_hat[n] = L[n] - g[n] + g[n+1] (last note: L[N] - g[N]). Requires
// g[0] == 0. Non-positive results raise a DataError in HardError mode and
// are clamped to one frame (surplus donated from the largest entries) in
// Repair mode.
AdjustedNoteLengths adjust_note_lengths(const std::vector<int>& lengths,
                                        const TimeLagVector& lags,
                                        RepairMode mode = RepairMode::HardError);

// Largest-remainder integerization preserving sum == target_total, minimum
// one frame per phoneme (enforced by donation from the largest phoneme).
// Remainder ties give the extra frame to the later phoneme.
std::vector<int> integerize_durations(const std::vector<double>& exact,
                                      int target_total);

struct AllocationResult {
  std::vector<int> frames;
  bool repaired = false;
};

// Note-level uniform scaling of predicted means.
std::vector<double> allocate_uniform_real(double l_hat, const std::vector<double>& mu);
AllocationResult allocate_uniform(double l_hat, const std::vector<double>& mu);

// Constrained maximum-likelihood allocation:
//   d_k = mu_k + rho * var_k,  rho = (l_hat - sum mu) / sum var,
// which maximizes sum_k log N(d_k | mu_k, var_k) subject to sum d = l_hat.
// Non-positive d_k raise a DataError (HardError) or are clamped to one
// frame with the remainder re-solved over the free phonemes (Repair).
std::vector<double> allocate_ml_real(double l_hat, const DurationDistribution& dist,
                                     RepairMode mode, bool* repaired);
AllocationResult allocate_ml(double l_hat, const DurationDistribution& dist,
                             RepairMode mode = RepairMode::HardError);

// Model wrappers. The time-lag model predicts one point value per note
// (first forced to 0); the duration model is a single-Gaussian MDN whose
// log-variance head goes through exp.
TimeLagVector predict_time_lags(const Matrix& note_features, const Network& net);
TimeLagVector round_lags(const TimeLagVector& lags);
DurationDistribution predict_durations(const Matrix& phoneme_features,
                                       const Network& net);

}  // namespace cantus

#endif  // CANTUS_TIMING_H_
