// cantus/correction.h

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

#ifndef CANTUS_CORRECTION_H_
#define CANTUS_CORRECTION_H_

#include <cstdint>
#include <vector>

#include "cantus/alignment.h"
#include "cantus/f0.h"
#include "cantus/features.h"
#include "cantus/score.h"
#include "cantus/train.h"

namespace cantus {

// Training-time note pitch source. Synthesis always uses the score's
// original note pitch with zero bias, whatever was trained.
enum class NotePitchMode { Original, Heuristic, Bias };

NotePitchMode note_pitch_mode_from_string(const std::string& s);
std::string note_pitch_mode_to_string(NotePitchMode m);

struct CorrectionConfig {
  NotePitchMode mode = NotePitchMode::Original;
  PriorConfig prior;  // sigma_p = inf -> prior off
};

// Flat-part detector constants (config-exposed; no constants in the
// source material).
struct HeuristicPitchConfig {
  int median_window = 45;
  double slope_threshold_cents = 10.0;  // per frame, on the smoothed track
  int min_flat_run = 10;
};

// Per-note surrogate pitch. `fallback` marks notes where no flat run was
// found (median of voiced frames used) or no voiced frames existed (score
// pitch used). Rest entries carry the neighbor-filled score pitch.
struct PseudoNotePitch {
  std::vector<double> cents;
  std::vector<std::uint8_t> fallback;
};

PseudoNotePitch heuristic_pseudo_note_pitch(const F0Track& interpolated,
                                            const Score& score,
                                            const PhonemeAlignment& alignment,
                                            const HeuristicPitchConfig& cfg = {});

// One song of raw training data.
struct SongData {
  Score score;
  PhonemeAlignment alignment;
  F0Track f0;
  Matrix mgc;  // optional (0 x 0)
};

struct AcousticFeatureOptions {
  int median_window = 45;  // diff-vibrato smoothing
  bool include_sine_vibrato = false;
  VibratoThresholds vibrato;
  HeuristicPitchConfig heuristic;
};

// Builds the per-song training records: the f0 stream target is the
// median-smoothed (vibrato-removed) interpolated track, the diff-vibrato
// stream is the remainder, optional sine-vibrato and mel-cepstral streams
// follow. note_pitch is the mode's training-time pitch source expanded to
// frames over the aligned note spans.
std::vector<TrainRecord> build_acoustic_records(
    const std::vector<SongData>& songs, const ScoreFeatureSchema& schema,
    const CorrectionConfig& config, const AcousticFeatureOptions& options,
    StreamLayout* layout_out, std::vector<PseudoNotePitch>* pseudo_out);

struct CorrectionSystem {
  AcousticModel model;
  CorrectionConfig config;
  std::vector<PseudoNotePitch> pseudo;  // per song, Heuristic mode only
};

// Trains one Table-IV-style configuration (pitch source x prior) on the
// dataset. `base` supplies network/criterion/optimizer settings; its prior
// and bias fields are overridden from `config`.
CorrectionSystem run_configuration(const CorrectionConfig& config,
                                   const std::vector<SongData>& songs,
                                   const ScoreFeatureSchema& schema,
                                   const AcousticConfig& base,
                                   const AcousticFeatureOptions& options = {},
                                   TrainResult* result = nullptr);

// Synthesis-stage F0 for one song: original note pitch + predicted residual
// (+ scaled diff vibrato). Never consults pseudo pitches or biases.
struct GeneratedF0 {
  std::vector<double> note_pitch;   // p, cents
  std::vector<double> f0_no_vib;    // p + mu
  std::vector<double> f0;           // p + mu + alpha * vibrato
  Matrix statics;                   // all generated static streams
};

GeneratedF0 synthesize_f0(const AcousticModel& model, const Score& score,
                          const PhonemeAlignment& alignment,
                          const ScoreFeatureSchema& schema,
                          double vibrato_scale = 1.0);

}  // namespace cantus

#endif  // CANTUS_CORRECTION_H_
