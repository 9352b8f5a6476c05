// eval/metrics.cpp

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

#include "cantus/metrics.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace cantus {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b,
                const std::vector<std::uint8_t>* mask) {
  if (a.size() != b.size()) throw DataError("metric: length mismatch");
  if (mask && mask->size() != a.size()) throw DataError("metric: mask length mismatch");
}

}  // namespace

double rmse(std::span<const double> a, std::span<const double> b,
            const std::vector<std::uint8_t>* mask) {
  check_pair(a, b, mask);
  double ssq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    double d = a[i] - b[i];
    ssq += d * d;
    ++n;
  }
  if (n == 0) throw DataError("rmse: no frames selected");
  return std::sqrt(ssq / n);
}

double pearson_corr(std::span<const double> a, std::span<const double> b,
                    const std::vector<std::uint8_t>* mask) {
  check_pair(a, b, mask);
  double sa = 0.0, sb = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    sa += a[i];
    sb += b[i];
    ++n;
  }
  if (n == 0) throw DataError("pearson_corr: no frames selected");
  double ma = sa / n, mb = sb / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa < 1e-12 || sbb < 1e-12) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double mcd_db(const Matrix& mgc_a, const Matrix& mgc_b) {
  if (mgc_a.rows != mgc_b.rows || mgc_a.cols != mgc_b.cols)
    throw DataError("mcd: shape mismatch");
  if (mgc_a.rows == 0 || mgc_a.cols < 2)
    throw DataError("mcd: need at least one frame and two coefficients");
  const double factor = 10.0 / std::log(10.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < mgc_a.rows; ++t) {
    double ssq = 0.0;
    for (std::size_t d = 1; d < mgc_a.cols; ++d) {
      double delta = mgc_a.at(t, d) - mgc_b.at(t, d);
      ssq += delta * delta;
    }
    acc += factor * std::sqrt(2.0 * ssq);
  }
  return acc / static_cast<double>(mgc_a.rows);
}

DurationMetrics duration_metrics(const Score& score,
                                 const PhonemeAlignment& predicted,
                                 const PhonemeAlignment& reference) {
  auto pred_ranges = map_alignment_to_score(score, predicted);
  auto ref_ranges = map_alignment_to_score(score, reference);

  std::vector<double> pred_ph, ref_ph, pred_note, ref_note;
  for (const auto& s : predicted.segments) pred_ph.push_back(s.end_frame - s.start_frame);
  for (const auto& s : reference.segments) ref_ph.push_back(s.end_frame - s.start_frame);
  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    double p = 0.0, r = 0.0;
    for (int s = pred_ranges[n].first; s < pred_ranges[n].second; ++s)
      p += predicted.segments[s].end_frame - predicted.segments[s].start_frame;
    for (int s = ref_ranges[n].first; s < ref_ranges[n].second; ++s)
      r += reference.segments[s].end_frame - reference.segments[s].start_frame;
    pred_note.push_back(p);
    ref_note.push_back(r);
  }

  DurationMetrics m;
  m.rmse_phoneme = rmse(pred_ph, ref_ph);
  m.rmse_note = rmse(pred_note, ref_note);
  m.corr_phoneme = pearson_corr(pred_ph, ref_ph);
  m.corr_note = pearson_corr(pred_note, ref_note);
  return m;
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "RMSE_note  [cent] %10.4f\n", rmse_note);
  out << buf;
  std::snprintf(buf, sizeof buf, "CORR_note         %10.6f\n", corr_note);
  out << buf;
  if (rmse_nat) {
    std::snprintf(buf, sizeof buf, "RMSE_nat   [cent] %10.4f\n", *rmse_nat);
    out << buf;
  }
  if (corr_nat) {
    std::snprintf(buf, sizeof buf, "CORR_nat          %10.6f\n", *corr_nat);
    out << buf;
  }
  if (mcd) {
    std::snprintf(buf, sizeof buf, "MCD        [dB]   %10.4f\n", *mcd);
    out << buf;
  }
  if (duration) {
    std::snprintf(buf, sizeof buf, "DUR_RMSE_note    [frame] %8.4f\n", duration->rmse_note);
    out << buf;
    std::snprintf(buf, sizeof buf, "DUR_RMSE_phoneme [frame] %8.4f\n", duration->rmse_phoneme);
    out << buf;
    std::snprintf(buf, sizeof buf, "DUR_CORR_note            %8.6f\n", duration->corr_note);
    out << buf;
    std::snprintf(buf, sizeof buf, "DUR_CORR_phoneme         %8.6f\n", duration->corr_phoneme);
    out << buf;
  }
  return out.str();
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["rmse_note"] = rmse_note;
  j["corr_note"] = corr_note;
  if (rmse_nat) j["rmse_nat"] = *rmse_nat;
  if (corr_nat) j["corr_nat"] = *corr_nat;
  if (mcd) j["mcd"] = *mcd;
  if (duration) {
    j["dur_rmse_note"] = duration->rmse_note;
    j["dur_rmse_phoneme"] = duration->rmse_phoneme;
    j["dur_corr_note"] = duration->corr_note;
    j["dur_corr_phoneme"] = duration->corr_phoneme;
  }
  return j.dump(2);
}

}  // namespace cantus
