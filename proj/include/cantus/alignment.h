// cantus/alignment.h

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

#ifndef CANTUS_ALIGNMENT_H_
#define CANTUS_ALIGNMENT_H_

#include <string>
#include <utility>
#include <vector>

#include "cantus/common.h"

namespace cantus {

struct Score;  // score.h

// One time-aligned phoneme: half-open frame interval [start, end).
struct PhonemeSegment {
  int start_frame = 0;
  int end_frame = 0;
  std::string phoneme;
};

// Imported forced-alignment segmentation: monotone, gap-free, half-open.
// Label file format: one `start end phoneme` line per segment; start/end
// are frame indices, or 100 ns HTK units when loaded with htk_units=true.
struct PhonemeAlignment {
  std::vector<PhonemeSegment> segments;

  int total_frames() const { return segments.empty() ? 0 : segments.back().end_frame; }
  void validate() const;  // throws DataError on overlap/gap/empty segments

  static PhonemeAlignment from_label_text(const std::string& text,
                                          bool htk_units = false,
                                          double frame_shift_s = 0.005);
  std::string to_label_text() const;
  static PhonemeAlignment load(const std::string& path, bool htk_units = false,
                               double frame_shift_s = 0.005);
  void save(const std::string& path) const;
};

// Segment-index range [first, last) of each note. Rests map to one silence
// segment. Throws DataError when the alignment's phoneme symbols do not
// match the score's.
std::vector<std::pair<int, int>> map_alignment_to_score(
    const Score& score, const PhonemeAlignment& alignment);

// Per-note frame spans under the sung (aligned) boundaries.
std::vector<NoteSpan> note_spans_from_alignment(const Score& score,
                                                const PhonemeAlignment& alignment);

}  // namespace cantus

#endif  // CANTUS_ALIGNMENT_H_
