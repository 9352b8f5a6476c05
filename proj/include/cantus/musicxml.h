// cantus/musicxml.h

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

#ifndef CANTUS_MUSICXML_H_
#define CANTUS_MUSICXML_H_

#include <string>

#include "cantus/score.h"

namespace cantus {

// Supported MusicXML subset: uncompressed part-wise documents with a single
// part and voice; notes, rests, ties, lyrics, tempo, slurs, and breath
// marks. Constructs that would change musical meaning if dropped (grace
// notes, chords, tuplets, backup/forward, extra parts or voices, mid-score
// tempo changes) raise a DataError naming the construct. Display-only
// elements (type, stem, beam, ...) are ignored.
struct MusicXmlOptions {
  // Used when the document carries no <sound tempo>; 0 means "require it".
  double default_tempo_bpm = 0.0;
  double frame_shift_s = 0.005;
};

// Note lengths are quantized to frames with accumulated-error carrying:
// boundaries are placed at round(cumulative_seconds / frame_shift), so the
// song total never drifts. Notes are merged across ties. A note whose lyric
// is a long-vowel mark (or that has no lyric at all, i.e. a melisma
// continuation) gets long_vowel_symbol=true and no phonemes; run
// resolve_long_vowels afterwards. A breath mark appends one `br` phoneme to
// the note.
Score parse_musicxml(const std::string& xml_text, const PhonemeInventory& inventory,
                     const MusicXmlOptions& options = {});

Score load_musicxml(const std::string& path, const PhonemeInventory& inventory,
                    const MusicXmlOptions& options = {});

// Emits the same subset; parse(write(score)) reproduces the Score exactly
// whenever one frame is an integer number of divisions (synthdata always
// picks such tempi).
std::string write_musicxml(const Score& score);

}  // namespace cantus

#endif  // CANTUS_MUSICXML_H_
