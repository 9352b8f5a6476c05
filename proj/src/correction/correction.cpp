// correction/correction.cpp

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

#include "cantus/correction.h"

#include <algorithm>
#include <cmath>

namespace cantus {

NotePitchMode note_pitch_mode_from_string(const std::string& s) {
  if (s == "original") return NotePitchMode::Original;
  if (s == "heuristic") return NotePitchMode::Heuristic;
  if (s == "bias") return NotePitchMode::Bias;
  throw ConfigError("unknown note pitch mode: " + s);
}

std::string note_pitch_mode_to_string(NotePitchMode m) {
  switch (m) {
    case NotePitchMode::Original: return "original";
    case NotePitchMode::Heuristic: return "heuristic";
    case NotePitchMode::Bias: return "bias";
  }
  return "original";
}

namespace {

double median_of(std::vector<double> v) {
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

// Expands per-note values (non-rest notes constant, rests interpolated)
// over the given spans.
std::vector<double> expand_note_values(const std::vector<double>& per_note,
                                       const std::vector<NoteSpan>& spans) {
  BiasExpansion exp = BiasExpansion::build(spans);
  std::vector<double> non_rest;
  for (std::size_t n = 0; n < spans.size(); ++n) {
    if (!spans[n].is_rest) non_rest.push_back(per_note[n]);
  }
  return exp.expand(non_rest);
}

}  // namespace

PseudoNotePitch heuristic_pseudo_note_pitch(const F0Track& interpolated,
                                            const Score& score,
                                            const PhonemeAlignment& alignment,
                                            const HeuristicPitchConfig& cfg) {
  const auto spans = note_spans_from_alignment(score, alignment);
  const auto filled = note_pitches_filled(score);
  PseudoNotePitch out;
  out.cents.assign(score.notes.size(), 0.0);
  out.fallback.assign(score.notes.size(), 0);

  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    const NoteSpan& span = spans[n];
    if (score.notes[n].is_rest()) {
      out.cents[n] = filled[n];
      continue;
    }
    std::vector<double> slice(interpolated.cents.begin() + span.start_frame,
                              interpolated.cents.begin() + span.end_frame);
    std::vector<double> smoothed =
        slice.size() >= 2 ? median_smooth(slice, cfg.median_window) : slice;

    // flat frames: small first difference of the smoothed track
    const int len = static_cast<int>(smoothed.size());
    std::vector<double> flat_values;
    int run_start = -1;
    for (int i = 0; i <= len; ++i) {
      bool flat = false;
      if (i < len) {
        double d = (i + 1 < len) ? smoothed[i + 1] - smoothed[i]
                                 : (len > 1 ? smoothed[i] - smoothed[i - 1] : 0.0);
        flat = std::abs(d) < cfg.slope_threshold_cents;
      }
      if (flat && run_start < 0) run_start = i;
      if (!flat && run_start >= 0) {
        if (i - run_start >= cfg.min_flat_run) {
          for (int k = run_start; k < i; ++k) flat_values.push_back(smoothed[k]);
        }
        run_start = -1;
      }
    }

    if (!flat_values.empty()) {
      out.cents[n] = median_of(std::move(flat_values));
      continue;
    }

    // fallback: median of in-note voiced frames
    std::vector<double> voiced_vals;
    for (int t = span.start_frame; t < span.end_frame; ++t) {
      if (interpolated.voiced[t]) voiced_vals.push_back(interpolated.cents[t]);
    }
    out.fallback[n] = 1;
    out.cents[n] = voiced_vals.empty() ? score.notes[n].pitch_cents()
                                       : median_of(std::move(voiced_vals));
  }
  return out;
}

std::vector<TrainRecord> build_acoustic_records(
    const std::vector<SongData>& songs, const ScoreFeatureSchema& schema,
    const CorrectionConfig& config, const AcousticFeatureOptions& options,
    StreamLayout* layout_out, std::vector<PseudoNotePitch>* pseudo_out) {
  if (songs.empty()) throw DataError("build_acoustic_records: no songs");

  const int mgc_dims = static_cast<int>(songs.front().mgc.cols);
  StreamLayout layout;
  layout.streams.push_back({"f0", 1, true});
  layout.streams.push_back({"vib_diff", 1, false});
  if (options.include_sine_vibrato) {
    layout.streams.push_back({"vib_amp", 1, false});
    layout.streams.push_back({"vib_rate", 1, false});
    layout.streams.push_back({"vib_flag", 1, false});
  }
  if (mgc_dims > 0) layout.streams.push_back({"mgc", mgc_dims, false});

  std::vector<TrainRecord> records;
  if (pseudo_out) pseudo_out->clear();
  for (const auto& song : songs) {
    if (static_cast<int>(song.mgc.cols) != mgc_dims)
      throw DataError("build_acoustic_records: inconsistent mgc dimensions");
    const int T = song.alignment.total_frames();
    if (song.f0.frames() != T)
      throw DataError("build_acoustic_records: f0/alignment length mismatch");

    F0Track interp = interpolate_unvoiced(song.f0);
    auto [vib, smoothed] = extract_vibrato_diff(interp, options.median_window);
    auto spans = note_spans_from_alignment(song.score, song.alignment);

    TrainRecord rec;
    rec.spans = spans;
    rec.voiced = song.f0.voiced;
    rec.features = encode_frame_features(song.score, schema, song.alignment);

    // training-time pitch source
    std::vector<double> per_note;
    if (config.mode == NotePitchMode::Heuristic) {
      PseudoNotePitch pseudo =
          heuristic_pseudo_note_pitch(interp, song.score, song.alignment, options.heuristic);
      per_note = pseudo.cents;
      if (pseudo_out) pseudo_out->push_back(std::move(pseudo));
    } else {
      per_note = note_pitches_filled(song.score);
      if (pseudo_out) pseudo_out->push_back({});
    }
    rec.note_pitch = expand_note_values(per_note, spans);

    rec.targets = Matrix(T, layout.total_dim());
    for (int t = 0; t < T; ++t) {
      int col = 0;
      rec.targets.at(t, col++) = smoothed.cents[t];
      rec.targets.at(t, col++) = vib.diff[t];
      col = 2;
      if (options.include_sine_vibrato) col += 3;
      for (int d = 0; d < mgc_dims; ++d) rec.targets.at(t, col + d) = song.mgc.at(t, d);
    }
    if (options.include_sine_vibrato) {
      auto [params, sections] = extract_vibrato_sine(interp, song.score.frame_shift_s, options.vibrato);
      for (int t = 0; t < T; ++t) {
        rec.targets.at(t, 2) = params.m_a[t];
        rec.targets.at(t, 3) = params.m_f[t];
        rec.targets.at(t, 4) = params.vib_flag[t] ? 1.0 : 0.0;
      }
    }
    records.push_back(std::move(rec));
  }
  if (layout_out) *layout_out = layout;
  return records;
}

CorrectionSystem run_configuration(const CorrectionConfig& config,
                                   const std::vector<SongData>& songs,
                                   const ScoreFeatureSchema& schema,
                                   const AcousticConfig& base,
                                   const AcousticFeatureOptions& options,
                                   TrainResult* result) {
  StreamLayout layout;
  CorrectionSystem sys;
  sys.config = config;
  auto records = build_acoustic_records(songs, schema, config, options, &layout,
                                        &sys.pseudo);
  AcousticConfig cfg = base;
  cfg.prior = config.prior;
  cfg.train_bias = config.mode == NotePitchMode::Bias;
  sys.model = train_acoustic(records, layout, cfg, result);
  return sys;
}

GeneratedF0 synthesize_f0(const AcousticModel& model, const Score& score,
                          const PhonemeAlignment& alignment,
                          const ScoreFeatureSchema& schema,
                          double vibrato_scale) {
  GeneratedF0 gen;
  Matrix features = encode_frame_features(score, schema, alignment);
  auto spans = note_spans_from_alignment(score, alignment);
  gen.note_pitch = [&] {
    BiasExpansion exp = BiasExpansion::build(spans);
    std::vector<double> non_rest;
    for (std::size_t n = 0; n < spans.size(); ++n) {
      if (!spans[n].is_rest) non_rest.push_back(score.notes[n].pitch_cents());
    }
    return exp.expand(non_rest);
  }();

  gen.statics = acoustic_infer_static(model, features, gen.note_pitch);

  const int T = static_cast<int>(gen.statics.rows);
  const int f0_off = model.layout.f0_offset();
  if (f0_off < 0) throw ConfigError("synthesize_f0: model has no f0 stream");
  int vib_off = -1, off = 0;
  for (const auto& s : model.layout.streams) {
    if (s.name == "vib_diff") vib_off = off;
    off += s.dim;
  }
  gen.f0_no_vib.resize(T);
  gen.f0.resize(T);
  for (int t = 0; t < T; ++t) {
    gen.f0_no_vib[t] = gen.note_pitch[t] + gen.statics.at(t, f0_off);
    double vib = vib_off >= 0 ? vibrato_scale * gen.statics.at(t, vib_off) : 0.0;
    gen.f0[t] = gen.f0_no_vib[t] + vib;
  }
  return gen;
}

}  // namespace cantus
