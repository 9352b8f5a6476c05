// cantus/features.h

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

#ifndef CANTUS_FEATURES_H_
#define CANTUS_FEATURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cantus/alignment.h"
#include "cantus/common.h"
#include "cantus/score.h"

namespace cantus {

// Score feature schemas are config artifacts, not code. File format:
//
//   # comment
//   version 1
//   categorical phoneme @inventory     # values from the phoneme inventory
//   categorical phoneme_class vowel consonant breath silence
//   numeric note_pitch
//
// Each categorical group one-hot encodes a registered extractor's label;
// each numeric line appends one value. Feature names must come from the
// registry below; levels nest as note < phoneme < frame, and an encoder
// only accepts features at or below its level.
//
// Registered extractors:
//   note level:    note_pitch, note_length, note_pos, phoneme_count,
//                  is_rest (categorical: no/yes),
//                  note_index (categorical; indices past the listed labels
//                  share the last bucket)
//   phoneme level: phoneme (categorical), phoneme_class (categorical),
//                  index_in_note
//   frame level:   frac_in_note, pos_in_note_fwd, pos_in_note_bwd,
//                  frac_in_phoneme, pos_in_phoneme_fwd, pos_in_phoneme_bwd,
//                  phoneme_length
struct FeatureDef {
  enum class Kind { Categorical, Numeric };
  Kind kind = Kind::Numeric;
  std::string name;
  std::vector<std::string> values;  // categorical only
};

struct ScoreFeatureSchema {
  int version = 1;
  std::vector<FeatureDef> features;

  std::size_t arity() const;
  std::string serialize() const;  // canonical form; hash() covers this
  std::uint64_t hash() const;

  static ScoreFeatureSchema parse(const std::string& text,
                                  const PhonemeInventory& inventory);
  static ScoreFeatureSchema load(const std::string& path,
                                 const PhonemeInventory& inventory);
  void save(const std::string& path) const;
};

// One row per note / phoneme / frame. Frame-level encoding takes the
// alignment (ground truth at training time, predicted at synthesis time);
// note and phoneme boundaries are the aligned ones.
Matrix encode_note_features(const Score& score, const ScoreFeatureSchema& schema);
Matrix encode_phoneme_features(const Score& score, const ScoreFeatureSchema& schema);
Matrix encode_frame_features(const Score& score, const ScoreFeatureSchema& schema,
                             const PhonemeAlignment& alignment);

}  // namespace cantus

#endif  // CANTUS_FEATURES_H_
