// cantus/score.h

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

#ifndef CANTUS_SCORE_H_
#define CANTUS_SCORE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cantus/common.h"

namespace cantus {

enum class PhonemeClass { Vowel, Consonant, Breath, Silence };

PhonemeClass phoneme_class_from_string(const std::string& s);
std::string phoneme_class_to_string(PhonemeClass c);

struct Phoneme {
  std::string symbol;
  PhonemeClass cls = PhonemeClass::Vowel;
  bool operator==(const Phoneme&) const = default;
};

// Phoneme symbol classes plus the syllable lexicon used to phonemize
// lyrics. File format, one entry per line:
//   phoneme <symbol> <vowel|consonant|breath|silence>
//   syllable <text> <phoneme> [<phoneme> ...]
struct PhonemeInventory {
  std::map<std::string, PhonemeClass> classes;
  std::map<std::string, std::vector<std::string>> lexicon;

  static PhonemeInventory default_japanese();
  static PhonemeInventory parse(const std::string& text);
  static PhonemeInventory load(const std::string& path);

  PhonemeClass classify(const std::string& symbol) const;
  std::vector<Phoneme> phonemize(const std::string& syllable) const;
  std::vector<std::string> vowel_symbols() const;
  std::vector<std::string> all_symbols() const;
};

struct NoteEvent {
  static constexpr int kRestPitch = -(1 << 30);

  int index = 0;
  int midi_pitch = kRestPitch;
  int length_frames = 0;
  std::string syllable;
  std::vector<Phoneme> phonemes;
  bool slur = false;
  bool breath_mark = false;
  bool long_vowel_symbol = false;

  bool is_rest() const { return midi_pitch == kRestPitch; }
  double pitch_cents() const { return midi_to_cents(midi_pitch); }
};

struct Score {
  double tempo_bpm = 0.0;
  double frame_shift_s = 0.005;
  std::vector<NoteEvent> notes;

  int total_frames() const;
  void validate() const;  // invariants: positive lengths, phonemes on non-rests
};

// Per-frame note pitch in cents (A4 = 0): constant over non-rest notes,
// linear across interior rests between the flanking note pitches, held at
// the nearest pitch over edge rests.
struct NotePitchSequence {
  std::vector<double> cents;
  std::vector<std::uint8_t> rest_mask;
};

NotePitchSequence note_pitch_sequence(const Score& score);

// Per-note pitch with rests filled from the previous (else next) non-rest
// note; feeds note-level features and the skip connection.
std::vector<double> note_pitches_filled(const Score& score);

// Frame spans of notes under the score's own boundaries.
std::vector<NoteSpan> note_spans_from_score(const Score& score);

// Long-vowel-symbol resolution rules. The diphthong table maps a vowel
// symbol to the symbol that should be duplicated in its place.
struct LongVowelRules {
  std::string id;
  std::map<std::string, std::string> diphthong_map;

  static LongVowelRules japanese();
  static LongVowelRules english_stub();
  static LongVowelRules by_id(const std::string& id);
};

// Assigns phonemes to long-vowel-symbol notes by duplicating the previous
// note's final vowel (transitively), applying the rule set's diphthong
// table. Never changes note count or lengths.
Score resolve_long_vowels(const Score& score, const LongVowelRules& rules);

}  // namespace cantus

#endif  // CANTUS_SCORE_H_
