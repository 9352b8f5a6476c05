// score/score.cpp

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

#include "cantus/score.h"

#include <fstream>
#include <sstream>

namespace cantus {

PhonemeClass phoneme_class_from_string(const std::string& s) {
  if (s == "vowel") return PhonemeClass::Vowel;
  if (s == "consonant") return PhonemeClass::Consonant;
  if (s == "breath") return PhonemeClass::Breath;
  if (s == "silence") return PhonemeClass::Silence;
  throw DataError("unknown phoneme class: " + s);
}

std::string phoneme_class_to_string(PhonemeClass c) {
  switch (c) {
    case PhonemeClass::Vowel: return "vowel";
    case PhonemeClass::Consonant: return "consonant";
    case PhonemeClass::Breath: return "breath";
    case PhonemeClass::Silence: return "silence";
  }
  return "vowel";
}

PhonemeInventory PhonemeInventory::default_japanese() {
  PhonemeInventory inv;
  const char* vowels[] = {"a", "i", "u", "e", "o"};
  const char* consonants[] = {"k",  "s",  "t",  "n", "h", "m", "y", "r", "w",
                              "g",  "z",  "d",  "b", "p", "j", "f", "v",
                              "ch", "ts", "sh", "N", "cl"};
  for (const char* v : vowels) inv.classes[v] = PhonemeClass::Vowel;
  for (const char* c : consonants) inv.classes[c] = PhonemeClass::Consonant;
  inv.classes["br"] = PhonemeClass::Breath;
  inv.classes["sil"] = PhonemeClass::Silence;
  inv.classes["pau"] = PhonemeClass::Silence;

  for (const char* v : vowels) inv.lexicon[v] = {v};
  const char* cv_consonants[] = {"k", "s", "t", "n", "h", "m", "y", "r", "w",
                                 "g", "z", "d", "b", "p", "j", "f",
                                 "ch", "ts", "sh"};
  for (const char* c : cv_consonants) {
    for (const char* v : vowels) {
      inv.lexicon[std::string(c) + v] = {c, v};
    }
  }
  inv.lexicon["n"] = {"N"};  // moraic nasal written alone
  return inv;
}

PhonemeInventory PhonemeInventory::parse(const std::string& text) {
  PhonemeInventory inv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line.substr(0, line.find('#'));
    std::istringstream ls(stripped);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "phoneme") {
      std::string sym, cls;
      if (!(ls >> sym >> cls))
        throw DataError("phoneme inventory line " + std::to_string(lineno) + ": expected `phoneme <symbol> <class>`");
      inv.classes[sym] = phoneme_class_from_string(cls);
    } else if (kind == "syllable") {
      std::string syl, ph;
      if (!(ls >> syl))
        throw DataError("phoneme inventory line " + std::to_string(lineno) + ": expected `syllable <text> <phonemes...>`");
      std::vector<std::string> phonemes;
      while (ls >> ph) phonemes.push_back(ph);
      if (phonemes.empty())
        throw DataError("phoneme inventory line " + std::to_string(lineno) + ": syllable with no phonemes");
      inv.lexicon[syl] = phonemes;
    } else {
      throw DataError("phoneme inventory line " + std::to_string(lineno) + ": unknown entry kind `" + kind + "`");
    }
  }
  return inv;
}

PhonemeInventory PhonemeInventory::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open phoneme inventory: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

PhonemeClass PhonemeInventory::classify(const std::string& symbol) const {
  auto it = classes.find(symbol);
  if (it == classes.end()) throw DataError("unknown phoneme symbol: " + symbol);
  return it->second;
}

std::vector<Phoneme> PhonemeInventory::phonemize(const std::string& syllable) const {
  auto it = lexicon.find(syllable);
  if (it == lexicon.end()) throw DataError("unknown syllable (not in lexicon): " + syllable);
  std::vector<Phoneme> out;
  for (const auto& sym : it->second) out.push_back({sym, classify(sym)});
  return out;
}

std::vector<std::string> PhonemeInventory::vowel_symbols() const {
  std::vector<std::string> out;
  for (const auto& [sym, cls] : classes) {
    if (cls == PhonemeClass::Vowel) out.push_back(sym);
  }
  return out;
}

std::vector<std::string> PhonemeInventory::all_symbols() const {
  std::vector<std::string> out;
  for (const auto& [sym, cls] : classes) out.push_back(sym);
  return out;
}

int Score::total_frames() const {
  int t = 0;
  for (const auto& n : notes) t += n.length_frames;
  return t;
}

void Score::validate() const {
  if (!(tempo_bpm > 0.0)) throw DataError("score: tempo must be positive");
  if (!(frame_shift_s > 0.0)) throw DataError("score: frame shift must be positive");
  for (const auto& n : notes) {
    if (n.length_frames < 1)
      throw DataError("score: note " + std::to_string(n.index) + " has non-positive length");
    if (!n.is_rest() && n.phonemes.empty() && !n.long_vowel_symbol)
      throw DataError("score: note " + std::to_string(n.index) + " has no phonemes");
  }
}

NotePitchSequence note_pitch_sequence(const Score& score) {
  const int T = score.total_frames();
  bool any_note = false;
  for (const auto& n : score.notes) any_note |= !n.is_rest();
  if (!any_note) throw DataError("note_pitch_sequence: score has no non-rest notes");

  NotePitchSequence seq;
  seq.cents.assign(T, 0.0);
  seq.rest_mask.assign(T, 0);

  const auto spans = note_spans_from_score(score);
  const int N = static_cast<int>(score.notes.size());
  for (int n = 0; n < N; ++n) {
    const NoteEvent& note = score.notes[n];
    const NoteSpan& span = spans[n];
    if (!note.is_rest()) {
      for (int t = span.start_frame; t < span.end_frame; ++t) seq.cents[t] = note.pitch_cents();
      continue;
    }
    for (int t = span.start_frame; t < span.end_frame; ++t) seq.rest_mask[t] = 1;
    int prev = -1, next = -1;
    for (int q = n - 1; q >= 0; --q) {
      if (!score.notes[q].is_rest()) { prev = q; break; }
    }
    for (int q = n + 1; q < N; ++q) {
      if (!score.notes[q].is_rest()) { next = q; break; }
    }
    if (prev < 0 && next < 0) continue;
    if (prev < 0) {
      for (int t = span.start_frame; t < span.end_frame; ++t)
        seq.cents[t] = score.notes[next].pitch_cents();
    } else if (next < 0) {
      for (int t = span.start_frame; t < span.end_frame; ++t)
        seq.cents[t] = score.notes[prev].pitch_cents();
    } else {
      // anchors at the last frame of prev and the first frame of next
      double a = score.notes[prev].pitch_cents();
      double b = score.notes[next].pitch_cents();
      double t0 = spans[prev].end_frame - 1;
      double t1 = spans[next].start_frame;
      for (int t = span.start_frame; t < span.end_frame; ++t) {
        double f = (t - t0) / (t1 - t0);
        seq.cents[t] = a + f * (b - a);
      }
    }
  }
  return seq;
}

std::vector<double> note_pitches_filled(const Score& score) {
  const int N = static_cast<int>(score.notes.size());
  std::vector<double> out(N, 0.0);
  for (int n = 0; n < N; ++n) {
    if (!score.notes[n].is_rest()) {
      out[n] = score.notes[n].pitch_cents();
      continue;
    }
    int found = -1;
    for (int q = n - 1; q >= 0; --q) {
      if (!score.notes[q].is_rest()) { found = q; break; }
    }
    if (found < 0) {
      for (int q = n + 1; q < N; ++q) {
        if (!score.notes[q].is_rest()) { found = q; break; }
      }
    }
    out[n] = found >= 0 ? score.notes[found].pitch_cents() : 0.0;
  }
  return out;
}

std::vector<NoteSpan> note_spans_from_score(const Score& score) {
  std::vector<NoteSpan> spans;
  int t = 0;
  for (const auto& n : score.notes) {
    spans.push_back({t, t + n.length_frames, n.is_rest()});
    t += n.length_frames;
  }
  return spans;
}

LongVowelRules LongVowelRules::japanese() { return {"jp", {}}; }

LongVowelRules LongVowelRules::english_stub() {
  // Duplicating a full diphthong degrades continuity; carry only its glide
  // target into the continuation note.
  return {"en",
          {{"aI", "I"}, {"eI", "I"}, {"OI", "I"}, {"aU", "U"}, {"oU", "U"}}};
}

LongVowelRules LongVowelRules::by_id(const std::string& id) {
  if (id == "jp") return japanese();
  if (id == "en") return english_stub();
  throw ConfigError("unknown long-vowel rule set: " + id);
}

Score resolve_long_vowels(const Score& score, const LongVowelRules& rules) {
  Score out = score;
  for (std::size_t n = 0; n < out.notes.size(); ++n) {
    NoteEvent& note = out.notes[n];
    if (!note.long_vowel_symbol) continue;
    if (note.is_rest())
      throw DataError("long-vowel symbol on a rest (note " + std::to_string(note.index) + ")");
    if (n == 0)
      throw DataError("long-vowel symbol on the first note");
    const NoteEvent& prev = out.notes[n - 1];  // already resolved (left-to-right)
    const Phoneme* last_vowel = nullptr;
    for (auto it = prev.phonemes.rbegin(); it != prev.phonemes.rend(); ++it) {
      if (it->cls == PhonemeClass::Vowel) { last_vowel = &*it; break; }
    }
    if (!last_vowel)
      throw DataError("long-vowel symbol after a note with no vowel (note " +
                      std::to_string(note.index) + ")");
    Phoneme dup = *last_vowel;
    auto it = rules.diphthong_map.find(dup.symbol);
    if (it != rules.diphthong_map.end()) dup.symbol = it->second;
    note.phonemes = {dup};
    if (note.breath_mark) note.phonemes.push_back({"br", PhonemeClass::Breath});
  }
  return out;
}

}  // namespace cantus
