// cantus/synth.h

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

#ifndef CANTUS_SYNTH_H_
#define CANTUS_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cantus/alignment.h"
#include "cantus/common.h"
#include "cantus/f0.h"
#include "cantus/score.h"

namespace cantus {

// Deterministic RNG for synthetic data. Gaussians come from a hand-rolled
// Box-Muller over mt19937_64 so outputs are bit-identical across standard
// libraries (std::normal_distribution is implementation-defined).
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : state_(seed) {}
  double uniform();            // [0, 1)
  double normal(double sigma); // N(0, sigma^2)
  int uniform_int(int lo, int hi);  // inclusive

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct SynthNoteSpec {
  int midi = NoteEvent::kRestPitch;  // rest by default
  int length_frames = 0;
  std::string syllable;  // from the default lexicon; empty on rests
};

// One synthetic song. F0 = note stair + detune + transients + vibrato +
// noise, each component recorded in the ledger.
struct SynthSpec {
  double tempo_bpm = 120.0;
  double frame_shift_s = 0.005;
  std::vector<SynthNoteSpec> notes;
  std::vector<double> detune_cents;  // per note; empty = all zero

  double vibrato_amp_cents = 0.0;
  double vibrato_rate_hz = 5.0;
  double vibrato_onset_frac = 0.3;
  int vibrato_min_note_frames = 40;
  std::vector<std::uint8_t> vibrato_mask;  // per note; empty = all eligible

  double overshoot_cents = 0.0;
  int overshoot_decay_frames = 8;
  double preparation_cents = 0.0;
  int preparation_decay_frames = 6;

  double noise_sigma_cents = 0.0;

  int consonant_frames = 8;            // nominal consonant length
  double consonant_jitter_frames = 0.0;
  double lag_sigma_frames = 0.0;       // vowel-onset jitter vs score onset

  int mgc_dims = 0;
  std::uint64_t seed = 1;
};

struct SynthLedger {
  // per frame; summing in this order reproduces f0.cents exactly
  std::vector<double> note_stair;
  std::vector<double> detune;
  std::vector<double> transient;
  std::vector<double> vibrato;
  std::vector<double> noise;
  // per note (rests get 0)
  std::vector<double> detune_per_note;
  std::vector<double> lag_per_note;
};

struct SyntheticSong {
  Score score;
  PhonemeAlignment alignment;
  F0Track f0;
  Matrix mgc;
  SynthLedger ledger;
};

SyntheticSong generate_synthetic_song(const SynthSpec& spec);

// Randomized corpus on top of generate_synthetic_song; every song's spec is
// derived deterministically from the corpus seed.
struct CorpusSpec {
  int num_songs = 4;
  int notes_per_song = 20;       // non-rest notes per song
  int min_note_frames = 40;
  int max_note_frames = 80;
  int midi_low = 57;             // A3
  int midi_high = 69;            // A4
  double rest_probability = 0.12;
  int rest_frames = 30;

  double detune_sigma_cents = 0.0;
  double detune_clip_cents = 100.0;
  double vibrato_probability = 0.0;
  double vibrato_amp_cents = 60.0;
  double vibrato_rate_hz = 5.5;
  double overshoot_cents = 0.0;
  double preparation_cents = 0.0;
  double noise_sigma_cents = 0.0;
  double lag_sigma_frames = 0.0;
  double consonant_jitter_frames = 0.0;
  int mgc_dims = 0;
  std::uint64_t seed = 1;
};

std::vector<SyntheticSong> generate_corpus(const CorpusSpec& spec);

}  // namespace cantus

#endif  // CANTUS_SYNTH_H_
