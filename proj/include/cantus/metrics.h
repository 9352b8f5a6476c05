// cantus/metrics.h

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

#ifndef CANTUS_METRICS_H_
#define CANTUS_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cantus/alignment.h"
#include "cantus/common.h"
#include "cantus/score.h"

namespace cantus {

// mask (optional) selects compared frames; by default F0 metrics run on
// frames voiced in both tracks.
double rmse(std::span<const double> a, std::span<const double> b,
            const std::vector<std::uint8_t>* mask = nullptr);
// Pearson correlation; returns 0 when either side is (numerically) constant.
double pearson_corr(std::span<const double> a, std::span<const double> b,
                    const std::vector<std::uint8_t>* mask = nullptr);

// Mel-cepstral distortion in dB, averaged over frames, excluding the 0-th
// coefficient: (10 / ln 10) * sqrt(2 * sum_d (a_d - b_d)^2).
double mcd_db(const Matrix& mgc_a, const Matrix& mgc_b);

struct DurationMetrics {
  double rmse_note = 0.0;
  double rmse_phoneme = 0.0;
  double corr_note = 0.0;
  double corr_phoneme = 0.0;
};

// Note durations are per-note sums of the phoneme segment lengths; the two
// alignments must segment the same score.
DurationMetrics duration_metrics(const Score& score,
                                 const PhonemeAlignment& predicted,
                                 const PhonemeAlignment& reference);

struct MetricsReport {
  double rmse_note = 0.0;
  double corr_note = 0.0;
  std::optional<double> rmse_nat;
  std::optional<double> corr_nat;
  std::optional<double> mcd;
  std::optional<DurationMetrics> duration;

  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace cantus

#endif  // CANTUS_METRICS_H_
