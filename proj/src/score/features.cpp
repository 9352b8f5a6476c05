// score/features.cpp

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

#include "cantus/features.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cantus {

namespace {

enum class Level { Note = 0, Phoneme = 1, Frame = 2 };

// Everything an extractor might need; phoneme/frame fields are only valid
// at their level or deeper.
struct FeatureContext {
  const Score* score = nullptr;
  int note_index = 0;
  std::vector<double> note_pitches;  // rest-filled, per note
  // phoneme level
  int phoneme_index_in_note = 0;
  const Phoneme* phoneme = nullptr;
  // frame level
  int frame = 0;                  // absolute
  int note_start = 0, note_end = 0;        // aligned note span
  int phoneme_start = 0, phoneme_end = 0;  // aligned phoneme span
};

double frac(int pos, int len) {
  return len > 1 ? static_cast<double>(pos) / (len - 1) : 0.0;
}

struct Extractor {
  Level min_level;
  FeatureDef::Kind kind;
  double (*numeric)(const FeatureContext&);
  std::string (*label)(const FeatureContext&);
};

const NoteEvent& cur_note(const FeatureContext& c) { return c.score->notes[c.note_index]; }

std::string label_note_index(const FeatureContext& c) {
  return std::to_string(c.note_index);
}

const std::map<std::string, Extractor>& registry() {
  static const std::map<std::string, Extractor> reg = {
      {"note_pitch",
       {Level::Note, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return c.note_pitches[c.note_index]; }, nullptr}},
      {"note_length",
       {Level::Note, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(cur_note(c).length_frames); },
        nullptr}},
      {"note_pos",
       {Level::Note, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) {
          return frac(c.note_index, static_cast<int>(c.score->notes.size()));
        },
        nullptr}},
      {"phoneme_count",
       {Level::Note, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) {
          return static_cast<double>(cur_note(c).is_rest() ? 1 : cur_note(c).phonemes.size());
        },
        nullptr}},
      {"is_rest",
       {Level::Note, FeatureDef::Kind::Categorical, nullptr,
        [](const FeatureContext& c) -> std::string {
          return cur_note(c).is_rest() ? "yes" : "no";
        }}},
      {"note_index", {Level::Note, FeatureDef::Kind::Categorical, nullptr, label_note_index}},
      {"phoneme",
       {Level::Phoneme, FeatureDef::Kind::Categorical, nullptr,
        [](const FeatureContext& c) { return c.phoneme->symbol; }}},
      {"phoneme_class",
       {Level::Phoneme, FeatureDef::Kind::Categorical, nullptr,
        [](const FeatureContext& c) { return phoneme_class_to_string(c.phoneme->cls); }}},
      {"index_in_note",
       {Level::Phoneme, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(c.phoneme_index_in_note); },
        nullptr}},
      {"frac_in_note",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) {
          return frac(c.frame - c.note_start, c.note_end - c.note_start);
        },
        nullptr}},
      {"pos_in_note_fwd",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(c.frame - c.note_start); },
        nullptr}},
      {"pos_in_note_bwd",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(c.note_end - 1 - c.frame); },
        nullptr}},
      {"frac_in_phoneme",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) {
          return frac(c.frame - c.phoneme_start, c.phoneme_end - c.phoneme_start);
        },
        nullptr}},
      {"pos_in_phoneme_fwd",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(c.frame - c.phoneme_start); },
        nullptr}},
      {"pos_in_phoneme_bwd",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(c.phoneme_end - 1 - c.frame); },
        nullptr}},
      {"phoneme_length",
       {Level::Frame, FeatureDef::Kind::Numeric,
        [](const FeatureContext& c) { return static_cast<double>(c.phoneme_end - c.phoneme_start); },
        nullptr}},
  };
  return reg;
}

const Extractor& find_extractor(const FeatureDef& def, Level level) {
  auto it = registry().find(def.name);
  if (it == registry().end())
    throw ConfigError("unknown feature name in schema: " + def.name);
  const Extractor& ex = it->second;
  if (ex.kind != def.kind)
    throw ConfigError("feature " + def.name + " has the wrong kind in the schema");
  if (static_cast<int>(ex.min_level) > static_cast<int>(level))
    throw ConfigError("feature " + def.name + " is not available at this encoding level");
  return ex;
}

// Fail fast at parse time: name known, kind right.
void validate_def(const FeatureDef& def) {
  auto it = registry().find(def.name);
  if (it == registry().end())
    throw ConfigError("unknown feature name in schema: " + def.name);
  if (it->second.kind != def.kind)
    throw ConfigError("feature " + def.name + " has the wrong kind in the schema");
}

void encode_row(const ScoreFeatureSchema& schema, Level level,
                const FeatureContext& ctx, double* row) {
  std::size_t slot = 0;
  for (const auto& def : schema.features) {
    const Extractor& ex = find_extractor(def, level);
    if (def.kind == FeatureDef::Kind::Numeric) {
      double v = ex.numeric(ctx);
      if (!std::isfinite(v)) throw NumericError("feature " + def.name + " is not finite");
      row[slot++] = v;
    } else {
      std::string label = ex.label(ctx);
      auto it = std::find(def.values.begin(), def.values.end(), label);
      std::size_t hot;
      if (it == def.values.end()) {
        if (def.name == "note_index") {
          hot = def.values.size() - 1;  // shared overflow bucket
        } else {
          throw DataError("feature " + def.name + ": label `" + label +
                          "` is not in the schema's value list");
        }
      } else {
        hot = static_cast<std::size_t>(it - def.values.begin());
      }
      for (std::size_t i = 0; i < def.values.size(); ++i) row[slot + i] = (i == hot) ? 1.0 : 0.0;
      slot += def.values.size();
    }
  }
}

}  // namespace

std::size_t ScoreFeatureSchema::arity() const {
  std::size_t n = 0;
  for (const auto& def : features) {
    n += def.kind == FeatureDef::Kind::Numeric ? 1 : def.values.size();
  }
  return n;
}

std::string ScoreFeatureSchema::serialize() const {
  std::ostringstream out;
  out << "version " << version << "\n";
  for (const auto& def : features) {
    if (def.kind == FeatureDef::Kind::Numeric) {
      out << "numeric " << def.name << "\n";
    } else {
      out << "categorical " << def.name;
      for (const auto& v : def.values) out << ' ' << v;
      out << "\n";
    }
  }
  return out.str();
}

std::uint64_t ScoreFeatureSchema::hash() const { return fnv1a64(serialize()); }

ScoreFeatureSchema ScoreFeatureSchema::parse(const std::string& text,
                                             const PhonemeInventory& inventory) {
  ScoreFeatureSchema schema;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_version = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line.substr(0, line.find('#'));
    std::istringstream ls(stripped);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "version") {
      if (!(ls >> schema.version))
        throw ConfigError("schema line " + std::to_string(lineno) + ": bad version");
      saw_version = true;
    } else if (kind == "numeric") {
      FeatureDef def;
      def.kind = FeatureDef::Kind::Numeric;
      if (!(ls >> def.name))
        throw ConfigError("schema line " + std::to_string(lineno) + ": numeric needs a name");
      validate_def(def);
      schema.features.push_back(def);
    } else if (kind == "categorical") {
      FeatureDef def;
      def.kind = FeatureDef::Kind::Categorical;
      if (!(ls >> def.name))
        throw ConfigError("schema line " + std::to_string(lineno) + ": categorical needs a name");
      std::string v;
      while (ls >> v) {
        if (v == "@inventory") {
          for (const auto& sym : inventory.all_symbols()) def.values.push_back(sym);
        } else {
          def.values.push_back(v);
        }
      }
      if (def.values.empty())
        throw ConfigError("schema line " + std::to_string(lineno) + ": categorical needs values");
      validate_def(def);
      schema.features.push_back(def);
    } else {
      throw ConfigError("schema line " + std::to_string(lineno) + ": unknown entry `" + kind + "`");
    }
  }
  if (!saw_version) throw ConfigError("schema file lacks a version line");
  return schema;
}

ScoreFeatureSchema ScoreFeatureSchema::load(const std::string& path,
                                            const PhonemeInventory& inventory) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), inventory);
}

void ScoreFeatureSchema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write schema file: " + path);
  out << serialize();
}

Matrix encode_note_features(const Score& score, const ScoreFeatureSchema& schema) {
  Matrix m(score.notes.size(), schema.arity());
  FeatureContext ctx;
  ctx.score = &score;
  ctx.note_pitches = note_pitches_filled(score);
  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    ctx.note_index = static_cast<int>(n);
    encode_row(schema, Level::Note, ctx, m.row(n));
  }
  return m;
}

Matrix encode_phoneme_features(const Score& score, const ScoreFeatureSchema& schema) {
  std::size_t rows = 0;
  for (const auto& note : score.notes) rows += note.is_rest() ? 1 : note.phonemes.size();
  Matrix m(rows, schema.arity());

  FeatureContext ctx;
  ctx.score = &score;
  ctx.note_pitches = note_pitches_filled(score);
  static const Phoneme kSil{"sil", PhonemeClass::Silence};
  std::size_t row = 0;
  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    const NoteEvent& note = score.notes[n];
    ctx.note_index = static_cast<int>(n);
    if (note.is_rest()) {
      ctx.phoneme_index_in_note = 0;
      ctx.phoneme = &kSil;
      encode_row(schema, Level::Phoneme, ctx, m.row(row++));
      continue;
    }
    for (std::size_t k = 0; k < note.phonemes.size(); ++k) {
      ctx.phoneme_index_in_note = static_cast<int>(k);
      ctx.phoneme = &note.phonemes[k];
      encode_row(schema, Level::Phoneme, ctx, m.row(row++));
    }
  }
  return m;
}

Matrix encode_frame_features(const Score& score, const ScoreFeatureSchema& schema,
                             const PhonemeAlignment& alignment) {
  const auto ranges = map_alignment_to_score(score, alignment);
  const int T = alignment.total_frames();
  Matrix m(T, schema.arity());

  FeatureContext ctx;
  ctx.score = &score;
  ctx.note_pitches = note_pitches_filled(score);
  static const Phoneme kSil{"sil", PhonemeClass::Silence};
  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    const NoteEvent& note = score.notes[n];
    ctx.note_index = static_cast<int>(n);
    ctx.note_start = alignment.segments[ranges[n].first].start_frame;
    ctx.note_end = alignment.segments[ranges[n].second - 1].end_frame;
    for (int s = ranges[n].first; s < ranges[n].second; ++s) {
      const PhonemeSegment& seg = alignment.segments[s];
      ctx.phoneme_index_in_note = s - ranges[n].first;
      ctx.phoneme = note.is_rest() ? &kSil : &note.phonemes[ctx.phoneme_index_in_note];
      ctx.phoneme_start = seg.start_frame;
      ctx.phoneme_end = seg.end_frame;
      for (int t = seg.start_frame; t < seg.end_frame; ++t) {
        ctx.frame = t;
        encode_row(schema, Level::Frame, ctx, m.row(t));
      }
    }
  }
  return m;
}

}  // namespace cantus
