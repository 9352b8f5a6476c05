// score/musicxml.cpp

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

#include "cantus/musicxml.h"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace cantus {

namespace {

namespace pt = boost::property_tree;

const char* kLongVowelMarks[] = {"\xE3\x83\xBC", "\xE2\x80\x94"};  // U+30FC, U+2014

bool is_long_vowel_mark(const std::string& text) {
  for (const char* m : kLongVowelMarks) {
    if (text == m) return true;
  }
  return false;
}

[[noreturn]] void unsupported(const std::string& what) {
  throw DataError("unsupported MusicXML construct: " + what);
}

int step_to_semitone(const std::string& step) {
  if (step == "C") return 0;
  if (step == "D") return 2;
  if (step == "E") return 4;
  if (step == "F") return 5;
  if (step == "G") return 7;
  if (step == "A") return 9;
  if (step == "B") return 11;
  throw DataError("bad pitch step: " + step);
}

// One note as read from the document, before tie merging and quantization.
struct RawNote {
  bool rest = false;
  int midi = NoteEvent::kRestPitch;
  double seconds = 0.0;
  bool has_lyric = false;
  std::string lyric;
  bool slur = false;
  bool breath = false;
  bool tie_start = false;
  bool tie_stop = false;
};

RawNote parse_note(const pt::ptree& note, double divisions, double tempo_bpm) {
  RawNote raw;
  bool have_duration = false;
  double duration_div = 0.0;
  int step_semi = -1, octave = 0, alter = 0;

  for (const auto& [name, child] : note) {
    if (name == "grace") unsupported("grace note");
    if (name == "chord") unsupported("chord");
    if (name == "cue") unsupported("cue note");
    if (name == "time-modification") unsupported("time-modification (tuplet)");
    if (name == "unpitched") unsupported("unpitched note");
    if (name == "rest") {
      raw.rest = true;
    } else if (name == "pitch") {
      step_semi = step_to_semitone(child.get<std::string>("step"));
      octave = child.get<int>("octave");
      alter = child.get("alter", 0);
    } else if (name == "duration") {
      duration_div = child.get_value<double>();
      have_duration = true;
    } else if (name == "voice") {
      if (child.get_value<std::string>() != "1") unsupported("multiple voices");
    } else if (name == "staff") {
      if (child.get_value<std::string>() != "1") unsupported("multiple staves");
    } else if (name == "tie") {
      std::string type = child.get<std::string>("<xmlattr>.type");
      if (type == "start") raw.tie_start = true;
      else if (type == "stop") raw.tie_stop = true;
    } else if (name == "lyric") {
      raw.has_lyric = true;
      raw.lyric = child.get<std::string>("text");
    } else if (name == "notations") {
      for (const auto& [nname, nchild] : child) {
        if (nname == "slur") raw.slur = true;
        else if (nname == "articulations") {
          if (nchild.get_child_optional("breath-mark")) raw.breath = true;
        }
        // tied/ornaments/dynamics: display only
      }
    }
    // type/stem/beam/dot/accidental/instrument/<xmlattr>: display only
  }

  if (!raw.rest && step_semi < 0) throw DataError("note without pitch or rest");
  if (!have_duration) throw DataError("note without duration");
  if (divisions <= 0.0) throw DataError("note before <divisions>");
  raw.midi = raw.rest ? NoteEvent::kRestPitch : 12 * (octave + 1) + step_semi + alter;
  raw.seconds = duration_div / divisions * 60.0 / tempo_bpm;
  return raw;
}

}  // namespace

Score parse_musicxml(const std::string& xml_text, const PhonemeInventory& inventory,
                     const MusicXmlOptions& options) {
  pt::ptree doc;
  try {
    std::istringstream in(xml_text);
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw DataError(std::string("malformed XML: ") + e.what());
  }

  if (doc.get_child_optional("score-timewise")) unsupported("score-timewise document");
  auto partwise = doc.get_child_optional("score-partwise");
  if (!partwise) throw DataError("not a part-wise MusicXML document");

  const pt::ptree* part = nullptr;
  for (const auto& [name, child] : *partwise) {
    if (name != "part") continue;
    if (part) unsupported("multiple parts");
    part = &child;
  }
  if (!part) throw DataError("MusicXML document has no <part>");

  // Pass 1: find the tempo. A single tempo governs the whole score.
  double tempo = 0.0;
  for (const auto& [mname, measure] : *part) {
    if (mname != "measure") continue;
    for (const auto& [ename, elem] : measure) {
      boost::optional<std::string> t;
      if (ename == "direction") t = elem.get_optional<std::string>("sound.<xmlattr>.tempo");
      else if (ename == "sound") t = elem.get_optional<std::string>("<xmlattr>.tempo");
      if (t) {
        double v = std::stod(*t);
        if (tempo > 0.0 && std::abs(v - tempo) > 1e-9) unsupported("mid-score tempo change");
        tempo = v;
      }
    }
  }
  if (tempo <= 0.0) {
    if (options.default_tempo_bpm <= 0.0)
      throw DataError("missing tempo: no <sound tempo> and no default supplied");
    tempo = options.default_tempo_bpm;
  }

  // Pass 2: notes.
  std::vector<RawNote> raws;
  double divisions = 0.0;
  for (const auto& [mname, measure] : *part) {
    if (mname != "measure") continue;
    for (const auto& [ename, elem] : measure) {
      if (ename == "attributes") {
        if (auto d = elem.get_optional<double>("divisions")) divisions = *d;
      } else if (ename == "note") {
        raws.push_back(parse_note(elem, divisions, tempo));
      } else if (ename == "backup" || ename == "forward") {
        unsupported(ename + " (multiple voices)");
      } else if (ename == "direction" || ename == "sound" || ename == "print" ||
                 ename == "barline" || ename == "<xmlattr>") {
        // handled above or display-only
      } else {
        unsupported("measure element <" + ename + ">");
      }
    }
  }

  // Tie merging (same pitch required; lyric kept from the chain head).
  std::vector<RawNote> merged;
  for (const auto& raw : raws) {
    if (raw.tie_stop && !merged.empty() && merged.back().tie_start) {
      RawNote& head = merged.back();
      if (head.rest != raw.rest || head.midi != raw.midi)
        throw DataError("tie between different pitches");
      head.seconds += raw.seconds;
      head.tie_start = raw.tie_start;  // chain continues if this one starts too
      head.slur |= raw.slur;
      head.breath |= raw.breath;
      continue;
    }
    merged.push_back(raw);
  }

  // Frame quantization with error carrying.
  Score score;
  score.tempo_bpm = tempo;
  score.frame_shift_s = options.frame_shift_s;
  double cum_seconds = 0.0;
  int cum_frames = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const RawNote& raw = merged[i];
    cum_seconds += raw.seconds;
    int end_frames = static_cast<int>(std::llround(cum_seconds / options.frame_shift_s));
    int len = end_frames - cum_frames;
    if (len < 1)
      throw DataError("note " + std::to_string(i) + " shorter than one frame");
    cum_frames = end_frames;

    NoteEvent note;
    note.index = static_cast<int>(i);
    note.midi_pitch = raw.midi;
    note.length_frames = len;
    note.slur = raw.slur;
    note.breath_mark = raw.breath;
    if (!raw.rest) {
      if (!raw.has_lyric || is_long_vowel_mark(raw.lyric)) {
        note.long_vowel_symbol = true;  // melisma / long-vowel continuation
      } else {
        note.syllable = raw.lyric;
        note.phonemes = inventory.phonemize(raw.lyric);
        if (raw.breath) note.phonemes.push_back({"br", PhonemeClass::Breath});
      }
    }
    score.notes.push_back(std::move(note));
  }
  return score;
}

Score load_musicxml(const std::string& path, const PhonemeInventory& inventory,
                    const MusicXmlOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MusicXML file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_musicxml(ss.str(), inventory, options);
}

std::string write_musicxml(const Score& score) {
  // One division per frame keeps durations integral.
  const double quarter_seconds = 60.0 / score.tempo_bpm;
  const int divisions = std::max(1, static_cast<int>(std::llround(quarter_seconds / score.frame_shift_s)));

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<score-partwise version=\"3.1\">\n";
  out << "  <part-list>\n"
         "    <score-part id=\"P1\"><part-name>voice</part-name></score-part>\n"
         "  </part-list>\n";
  out << "  <part id=\"P1\">\n";
  out << "    <measure number=\"1\">\n";
  out << "      <attributes><divisions>" << divisions << "</divisions></attributes>\n";
  out << "      <direction><sound tempo=\"" << score.tempo_bpm << "\"/></direction>\n";

  static const char* kSteps[] = {"C", "C", "D", "D", "E", "F", "F", "G", "G", "A", "A", "B"};
  static const int kAlters[] = {0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0};
  for (const auto& note : score.notes) {
    out << "      <note>\n";
    if (note.is_rest()) {
      out << "        <rest/>\n";
    } else {
      int semis = note.midi_pitch % 12;
      int octave = note.midi_pitch / 12 - 1;
      out << "        <pitch><step>" << kSteps[semis] << "</step>";
      if (kAlters[semis]) out << "<alter>" << kAlters[semis] << "</alter>";
      out << "<octave>" << octave << "</octave></pitch>\n";
    }
    out << "        <duration>" << note.length_frames << "</duration>\n";
    if (!note.is_rest()) {
      if (note.long_vowel_symbol) {
        out << "        <lyric><syllabic>single</syllabic><text>\xE3\x83\xBC</text></lyric>\n";
      } else if (!note.syllable.empty()) {
        out << "        <lyric><syllabic>single</syllabic><text>" << note.syllable
            << "</text></lyric>\n";
      }
    }
    if (note.slur || note.breath_mark) {
      out << "        <notations>";
      if (note.slur) out << "<slur type=\"start\"/>";
      if (note.breath_mark) out << "<articulations><breath-mark/></articulations>";
      out << "</notations>\n";
    }
    out << "      </note>\n";
  }
  out << "    </measure>\n  </part>\n</score-partwise>\n";
  return out.str();
}

}  // namespace cantus
