// score/alignment.cpp

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

#include "cantus/alignment.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cantus/score.h"

namespace cantus {

void PhonemeAlignment::validate() const {
  if (segments.empty()) throw DataError("alignment: no segments");
  if (segments.front().start_frame != 0)
    throw DataError("alignment: first segment must start at frame 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (s.end_frame <= s.start_frame)
      throw DataError("alignment: empty or inverted segment at index " + std::to_string(i));
    if (i > 0 && s.start_frame != segments[i - 1].end_frame)
      throw DataError("alignment: gap or overlap before segment " + std::to_string(i));
  }
}

PhonemeAlignment PhonemeAlignment::from_label_text(const std::string& text,
                                                   bool htk_units,
                                                   double frame_shift_s) {
  PhonemeAlignment a;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    double start, end;
    std::string ph;
    if (!(ls >> start >> end >> ph)) {
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      throw DataError("label file line " + std::to_string(lineno) +
                      ": expected `start end phoneme`");
    }
    if (htk_units) {
      start = start * 1e-7 / frame_shift_s;
      end = end * 1e-7 / frame_shift_s;
    }
    a.segments.push_back({static_cast<int>(std::llround(start)),
                          static_cast<int>(std::llround(end)), ph});
  }
  a.validate();
  return a;
}

std::string PhonemeAlignment::to_label_text() const {
  std::ostringstream out;
  for (const auto& s : segments) {
    out << s.start_frame << ' ' << s.end_frame << ' ' << s.phoneme << '\n';
  }
  return out.str();
}

PhonemeAlignment PhonemeAlignment::load(const std::string& path, bool htk_units,
                                        double frame_shift_s) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open label file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_label_text(ss.str(), htk_units, frame_shift_s);
}

void PhonemeAlignment::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write label file: " + path);
  out << to_label_text();
}

std::vector<std::pair<int, int>> map_alignment_to_score(
    const Score& score, const PhonemeAlignment& alignment) {
  alignment.validate();
  std::vector<std::pair<int, int>> ranges;
  ranges.reserve(score.notes.size());
  std::size_t seg = 0;
  for (const auto& note : score.notes) {
    std::vector<std::string> expected;
    if (note.is_rest()) {
      expected = {"sil"};
    } else {
      for (const auto& p : note.phonemes) expected.push_back(p.symbol);
    }
    int first = static_cast<int>(seg);
    for (const auto& sym : expected) {
      if (seg >= alignment.segments.size())
        throw DataError("alignment shorter than score (ran out at note " +
                        std::to_string(note.index) + ")");
      if (alignment.segments[seg].phoneme != sym)
        throw DataError("alignment/score phoneme mismatch at segment " +
                        std::to_string(seg) + ": got `" +
                        alignment.segments[seg].phoneme + "`, score expects `" +
                        sym + "`");
      ++seg;
    }
    ranges.emplace_back(first, static_cast<int>(seg));
  }
  if (seg != alignment.segments.size())
    throw DataError("alignment has " +
                    std::to_string(alignment.segments.size() - seg) +
                    " trailing segments beyond the score");
  return ranges;
}

std::vector<NoteSpan> note_spans_from_alignment(const Score& score,
                                                const PhonemeAlignment& alignment) {
  auto ranges = map_alignment_to_score(score, alignment);
  std::vector<NoteSpan> spans;
  spans.reserve(ranges.size());
  for (std::size_t n = 0; n < ranges.size(); ++n) {
    spans.push_back({alignment.segments[ranges[n].first].start_frame,
                     alignment.segments[ranges[n].second - 1].end_frame,
                     score.notes[n].is_rest()});
  }
  return spans;
}

}  // namespace cantus
