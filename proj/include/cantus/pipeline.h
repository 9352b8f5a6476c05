// cantus/pipeline.h

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

#ifndef CANTUS_PIPELINE_H_
#define CANTUS_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "cantus/correction.h"
#include "cantus/metrics.h"
#include "cantus/synth.h"
#include "cantus/timing.h"

namespace cantus {

struct SongPaths {
  std::string name;
  std::string score;
  std::string labels;
  std::string f0;
};

struct TimingModelConfig {
  std::vector<int> hidden_widths{32};
  Activation activation = Activation::Sigmoid;
  AdamConfig adam;
};

// Project configuration file (JSON). Paths are resolved relative to the
// config file's directory.
struct ProjectConfig {
  double frame_shift_s = 0.005;
  std::string schema_path;
  std::string inventory_path;  // empty -> built-in Japanese inventory
  std::string language = "jp";
  bool labels_htk_units = false;
  double default_tempo_bpm = 0.0;
  std::vector<SongPaths> songs;

  TimingModelConfig timelag;
  TimingModelConfig duration;
  AcousticConfig acoustic;  // prior/train_bias filled from `correction`
  CorrectionConfig correction;
  AcousticFeatureOptions features;
  RepairMode timing_repair = RepairMode::Repair;
  double vibrato_scale = 1.0;

  std::string checkpoint_dir = "checkpoints";
  std::string output_dir = "gen";
  std::string report_dir = "reports";

  static ProjectConfig load(const std::string& path);
};

// Loaded, long-vowel-resolved inputs.
struct ProjectData {
  PhonemeInventory inventory;
  ScoreFeatureSchema schema;
  std::vector<SongData> songs;
  std::vector<std::string> names;
};

ProjectData load_project_data(const ProjectConfig& cfg, bool need_f0 = true,
                              bool need_labels = true);

// Training entry points used by the CLI; each writes a checkpoint.
void cmd_train_timelag(const ProjectConfig& cfg, const std::string& out_path);
void cmd_train_duration(const ProjectConfig& cfg, const std::string& out_path);
void cmd_train_acoustic(const ProjectConfig& cfg, const std::string& out_path);

// Full synthesis-stage chain for one score: predicted time lags -> adjusted
// note lengths -> constrained ML duration allocation -> frame features ->
// acoustic regression -> p + mu (+ scaled vibrato).
struct GenerationResult {
  PhonemeAlignment alignment;  // predicted
  GeneratedF0 f0;
  std::vector<std::uint8_t> voiced;  // rests unvoiced
  bool timing_repaired = false;
};

GenerationResult generate_song(const Score& score, const Network& timelag_net,
                               const Network& duration_net,
                               const AcousticModel& acoustic,
                               const ScoreFeatureSchema& schema,
                               RepairMode timing_repair, double vibrato_scale);

// Objective metrics between a generated track and the score (RMSE/CORR vs
// the note-pitch stairs) plus, when given, a natural reference track.
MetricsReport evaluate_f0(const std::vector<double>& generated_cents,
                          const std::vector<std::uint8_t>& generated_voiced,
                          const Score& score, const PhonemeAlignment& alignment,
                          const F0Track* natural);

// Synthetic dataset emission: writes MusicXML + label + F0 files, the
// feature schema, ledger JSONs, and a ready-to-train project.json.
struct SynthdataOptions {
  CorpusSpec corpus;
  int note_index_labels = 0;  // >0: add a note_index categorical group
  std::string schema_extra;   // extra schema lines appended
};

void write_synthetic_project(const std::string& dir, const SynthdataOptions& options);

// Plain harmonic preview tone (debugging aid, not a vocoder): 16-bit mono
// PCM WAV at `sample_rate`, per-frame F0 in Hz (0 = silence).
std::string render_preview_tone_wav(const std::vector<double>& f0_hz,
                                    double frame_shift_s, int sample_rate = 16000);

}  // namespace cantus

#endif  // CANTUS_PIPELINE_H_
