// tests/test_score.cpp

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

#include <sstream>

#include "doctest.h"

#include "cantus/features.h"
#include "cantus/musicxml.h"
#include "cantus/score.h"

using namespace cantus;

namespace {

const PhonemeInventory& inv() {
  static const PhonemeInventory i = PhonemeInventory::default_japanese();
  return i;
}

std::string xml_doc(const std::string& measures, int divisions = 1,
                    const std::string& tempo = "<direction><sound tempo=\"120\"/></direction>") {
  std::ostringstream out;
  out << "<?xml version=\"1.0\"?><score-partwise version=\"3.1\">"
      << "<part-list><score-part id=\"P1\"><part-name>v</part-name></score-part></part-list>"
      << "<part id=\"P1\"><measure number=\"1\">"
      << "<attributes><divisions>" << divisions << "</divisions></attributes>" << tempo
      << measures << "</measure></part></score-partwise>";
  return out.str();
}

std::string note_xml(const std::string& pitch_or_rest, int duration,
                     const std::string& lyric = "", const std::string& extra = "") {
  std::ostringstream out;
  out << "<note>" << pitch_or_rest << "<duration>" << duration << "</duration>";
  if (!lyric.empty())
    out << "<lyric><syllabic>single</syllabic><text>" << lyric << "</text></lyric>";
  out << extra << "</note>";
  return out.str();
}

const std::string kC4 = "<pitch><step>C</step><octave>4</octave></pitch>";
const std::string kA4 = "<pitch><step>A</step><octave>4</octave></pitch>";

Score make_score(const std::vector<NoteEvent>& notes, double tempo = 120.0) {
  Score s;
  s.tempo_bpm = tempo;
  s.notes = notes;
  return s;
}

NoteEvent note(int idx, int midi, int frames, const std::string& syl) {
  NoteEvent n;
  n.index = idx;
  n.midi_pitch = midi;
  n.length_frames = frames;
  if (midi != NoteEvent::kRestPitch && !syl.empty()) {
    n.syllable = syl;
    n.phonemes = inv().phonemize(syl);
  }
  return n;
}

}  // namespace

TEST_CASE("quarter note at 120 bpm with 5 ms frames is 100 frames") {
  Score s = parse_musicxml(xml_doc(note_xml(kC4, 1, "ka")), inv());
  REQUIRE(s.notes.size() == 1);
  CHECK(s.notes[0].length_frames == 100);
  CHECK(s.notes[0].midi_pitch == 60);
  CHECK(s.notes[0].syllable == "ka");
  REQUIRE(s.notes[0].phonemes.size() == 2);
  CHECK(s.notes[0].phonemes[0].symbol == "k");
  CHECK(s.notes[0].phonemes[1].symbol == "a");
}

TEST_CASE("whole-measure rest becomes a rest note with no phonemes") {
  Score s = parse_musicxml(xml_doc(note_xml("<rest/>", 4)), inv());
  REQUIRE(s.notes.size() == 1);
  CHECK(s.notes[0].is_rest());
  CHECK(s.notes[0].phonemes.empty());
  CHECK(s.notes[0].length_frames == 400);
}

TEST_CASE("tied eighth notes of the same pitch merge into one note") {
  std::string two_tied =
      note_xml(kC4, 1, "ka", "<tie type=\"start\"/>") + note_xml(kC4, 1, "", "<tie type=\"stop\"/>");
  Score s = parse_musicxml(xml_doc(two_tied, 2), inv());  // divisions=2 -> eighths
  REQUIRE(s.notes.size() == 1);
  CHECK(s.notes[0].length_frames == 100);  // 2 x 50
  CHECK(s.notes[0].syllable == "ka");

  SUBCASE("tie across different pitches is rejected") {
    std::string bad =
        note_xml(kC4, 1, "ka", "<tie type=\"start\"/>") + note_xml(kA4, 1, "", "<tie type=\"stop\"/>");
    CHECK_THROWS_AS(parse_musicxml(xml_doc(bad, 2), inv()), DataError);
  }
}

TEST_CASE("frame quantization carries the rounding error (no drift)") {
  // 140 bpm: a quarter is 60/140 s = 85.714... frames; thirty notes must
  // total round(30 * 85.714...) without per-note drift.
  std::ostringstream notes;
  for (int i = 0; i < 30; ++i) notes << note_xml(kC4, 1, "a");
  Score s = parse_musicxml(
      xml_doc(notes.str(), 1, "<direction><sound tempo=\"140\"/></direction>"), inv());
  CHECK(s.notes.size() == 30);
  CHECK(s.total_frames() == static_cast<int>(std::llround(30 * (60.0 / 140.0) / 0.005)));
}

TEST_CASE("parser errors are specific") {
  SUBCASE("malformed XML") {
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_musicxml("<score-partwise><part>", inv())),
                         doctest::Contains("malformed XML"), DataError);
  }
  SUBCASE("missing tempo without default") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(parse_musicxml(xml_doc(note_xml(kC4, 1, "a"), 1, ""), inv())),
        doctest::Contains("missing tempo"), DataError);
  }
  SUBCASE("default tempo is accepted") {
    MusicXmlOptions opts;
    opts.default_tempo_bpm = 120.0;
    Score s = parse_musicxml(xml_doc(note_xml(kC4, 1, "a"), 1, ""), inv(), opts);
    CHECK(s.notes[0].length_frames == 100);
  }
  SUBCASE("grace notes are a named unsupported construct") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(parse_musicxml(xml_doc("<note><grace/>" + kC4 + "</note>"), inv())),
        doctest::Contains("grace"), DataError);
  }
  SUBCASE("tuplets are a named unsupported construct") {
    std::string tuplet = note_xml(kC4, 1, "a",
                                  "<time-modification><actual-notes>3</actual-notes>"
                                  "<normal-notes>2</normal-notes></time-modification>");
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_musicxml(xml_doc(tuplet), inv())),
                         doctest::Contains("time-modification"), DataError);
  }
  SUBCASE("multiple parts are unsupported") {
    std::string doc =
        "<score-partwise><part-list/><part id=\"P1\"/><part id=\"P2\"/></score-partwise>";
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_musicxml(doc, inv())),
                         doctest::Contains("multiple parts"), DataError);
  }
  SUBCASE("unknown syllable") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(parse_musicxml(xml_doc(note_xml(kC4, 1, "xyz")), inv())),
        doctest::Contains("unknown syllable"), DataError);
  }
}

TEST_CASE("slur and breath mark are captured; breath adds a br phoneme") {
  std::string marked = note_xml(
      kC4, 1, "ka",
      "<notations><slur type=\"start\"/><articulations><breath-mark/></articulations></notations>");
  Score s = parse_musicxml(xml_doc(marked), inv());
  CHECK(s.notes[0].slur);
  CHECK(s.notes[0].breath_mark);
  REQUIRE(s.notes[0].phonemes.size() == 3);
  CHECK(s.notes[0].phonemes[2].symbol == "br");
  CHECK(s.notes[0].phonemes[2].cls == PhonemeClass::Breath);
}

TEST_CASE("MusicXML round trip reproduces the score") {
  std::string doc = xml_doc(
      note_xml(kC4, 1, "ka") + note_xml("<rest/>", 2) + note_xml(kA4, 2, "to") +
          note_xml(kA4, 1, "\xE3\x83\xBC") +
          note_xml(kC4, 1, "mi", "<notations><slur type=\"start\"/></notations>"),
      1);
  Score a = parse_musicxml(doc, inv());
  Score b = parse_musicxml(write_musicxml(a), inv());
  REQUIRE(a.notes.size() == b.notes.size());
  CHECK(a.tempo_bpm == b.tempo_bpm);
  for (std::size_t i = 0; i < a.notes.size(); ++i) {
    CAPTURE(i);
    CHECK(a.notes[i].midi_pitch == b.notes[i].midi_pitch);
    CHECK(a.notes[i].length_frames == b.notes[i].length_frames);
    CHECK(a.notes[i].syllable == b.notes[i].syllable);
    CHECK(a.notes[i].slur == b.notes[i].slur);
    CHECK(a.notes[i].breath_mark == b.notes[i].breath_mark);
    CHECK(a.notes[i].long_vowel_symbol == b.notes[i].long_vowel_symbol);
    CHECK(a.notes[i].phonemes == b.notes[i].phonemes);
  }
}

TEST_CASE("long-vowel resolution duplicates the previous final vowel") {
  Score s = make_score({note(0, 60, 100, "ka"), note(1, 62, 100, "")});
  s.notes[1].long_vowel_symbol = true;
  Score r = resolve_long_vowels(s, LongVowelRules::japanese());
  REQUIRE(r.notes[1].phonemes.size() == 1);
  CHECK(r.notes[1].phonemes[0].symbol == "a");
  CHECK(r.notes[1].phonemes[0].cls == PhonemeClass::Vowel);

  SUBCASE("resolution is transitive across consecutive marks") {
    Score s3 = make_score({note(0, 60, 100, "ka"), note(1, 62, 100, ""), note(2, 64, 100, "")});
    s3.notes[1].long_vowel_symbol = true;
    s3.notes[2].long_vowel_symbol = true;
    Score r3 = resolve_long_vowels(s3, LongVowelRules::japanese());
    CHECK(r3.notes[1].phonemes[0].symbol == "a");
    CHECK(r3.notes[2].phonemes[0].symbol == "a");
  }
  SUBCASE("note count and lengths never change") {
    Score s3 = make_score({note(0, 60, 77, "ka"), note(1, 62, 33, "")});
    s3.notes[1].long_vowel_symbol = true;
    Score r3 = resolve_long_vowels(s3, LongVowelRules::japanese());
    REQUIRE(r3.notes.size() == s3.notes.size());
    for (std::size_t i = 0; i < r3.notes.size(); ++i)
      CHECK(r3.notes[i].length_frames == s3.notes[i].length_frames);
  }
  SUBCASE("first-note mark is an error") {
    Score bad = make_score({note(0, 60, 100, "")});
    bad.notes[0].long_vowel_symbol = true;
    CHECK_THROWS_AS(resolve_long_vowels(bad, LongVowelRules::japanese()), DataError);
  }
  SUBCASE("previous note without a vowel is an error") {
    Score bad = make_score({note(0, 60, 100, ""), note(1, 62, 100, "")});
    bad.notes[0].phonemes = {{"N", PhonemeClass::Consonant}};
    bad.notes[0].syllable = "n";
    bad.notes[1].long_vowel_symbol = true;
    CHECK_THROWS_AS(resolve_long_vowels(bad, LongVowelRules::japanese()), DataError);
  }
  SUBCASE("the diphthong table redirects the duplicated symbol") {
    LongVowelRules rules{"custom", {{"a", "i"}}};
    Score r2 = resolve_long_vowels(s, rules);
    CHECK(r2.notes[1].phonemes[0].symbol == "i");
  }
}

TEST_CASE("note pitch sequence: constants, interpolated rests, edge holds") {
  SUBCASE("single note is constant at its pitch") {
    Score s = make_score({note(0, 69, 10, "a")});  // A4
    auto seq = note_pitch_sequence(s);
    REQUIRE(seq.cents.size() == 10);
    for (double c : seq.cents) CHECK(c == 0.0);
    for (auto m : seq.rest_mask) CHECK(!m);
  }
  SUBCASE("interior rest ramps between the flanking pitches") {
    Score s = make_score(
        {note(0, 69, 10, "a"), note(1, NoteEvent::kRestPitch, 10, ""), note(2, 71, 10, "a")});
    auto seq = note_pitch_sequence(s);
    // anchors: frame 9 at 0 cents, frame 20 at 200 cents
    for (int t = 10; t < 20; ++t) {
      CHECK(seq.cents[t] == doctest::Approx((t - 9) * 200.0 / 11.0));
      CHECK(seq.rest_mask[t]);
    }
    CHECK(seq.cents[9] == 0.0);
    CHECK(seq.cents[20] == 200.0);
    // strictly increasing across the rest
    for (int t = 10; t < 20; ++t) CHECK(seq.cents[t] > seq.cents[t - 1]);
  }
  SUBCASE("leading rest holds the first note's pitch") {
    Score s = make_score({note(0, NoteEvent::kRestPitch, 5, ""), note(1, 69, 5, "a")});
    auto seq = note_pitch_sequence(s);
    for (int t = 0; t < 5; ++t) CHECK(seq.cents[t] == 0.0);
  }
  SUBCASE("all-rest score is an error") {
    Score s = make_score({note(0, NoteEvent::kRestPitch, 5, "")});
    CHECK_THROWS_AS(note_pitch_sequence(s), DataError);
  }
  SUBCASE("piecewise structure: constant inside notes, total length matches") {
    Score s = make_score({note(0, 60, 7, "a"), note(1, 64, 9, "a")});
    auto seq = note_pitch_sequence(s);
    CHECK(static_cast<int>(seq.cents.size()) == s.total_frames());
    for (int t = 1; t < 7; ++t) CHECK(seq.cents[t] == seq.cents[0]);
    for (int t = 8; t < 16; ++t) CHECK(seq.cents[t] == seq.cents[7]);
  }
}

TEST_CASE("frame feature encoding") {
  Score s = make_score({note(0, 69, 4, "a")});
  PhonemeAlignment ali;
  ali.segments = {{0, 4, "a"}};

  SUBCASE("fractional position within the phoneme is 0, 1/3, 2/3, 1") {
    ScoreFeatureSchema schema =
        ScoreFeatureSchema::parse("version 1\nnumeric frac_in_phoneme\n", inv());
    Matrix m = encode_frame_features(s, schema, ali);
    REQUIRE(m.rows == 4);
    CHECK(m.at(0, 0) == doctest::Approx(0.0));
    CHECK(m.at(1, 0) == doctest::Approx(1.0 / 3));
    CHECK(m.at(2, 0) == doctest::Approx(2.0 / 3));
    CHECK(m.at(3, 0) == doctest::Approx(1.0));
  }
  SUBCASE("categorical phoneme identity is exactly one-hot") {
    ScoreFeatureSchema schema =
        ScoreFeatureSchema::parse("version 1\ncategorical phoneme @inventory\n", inv());
    Matrix m = encode_frame_features(s, schema, ali);
    for (std::size_t t = 0; t < m.rows; ++t) {
      double sum = 0.0;
      for (std::size_t d = 0; d < m.cols; ++d) {
        CHECK((m.at(t, d) == 0.0 || m.at(t, d) == 1.0));
        sum += m.at(t, d);
      }
      CHECK(sum == 1.0);
    }
  }
  SUBCASE("empty schema yields zero-width rows without error") {
    ScoreFeatureSchema schema = ScoreFeatureSchema::parse("version 1\n", inv());
    Matrix m = encode_frame_features(s, schema, ali);
    CHECK(m.rows == 4);
    CHECK(m.cols == 0);
  }
  SUBCASE("alignment/score phoneme mismatch is an error") {
    PhonemeAlignment bad;
    bad.segments = {{0, 4, "i"}};
    ScoreFeatureSchema schema = ScoreFeatureSchema::parse("version 1\nnumeric note_pitch\n", inv());
    CHECK_THROWS_WITH_AS(static_cast<void>(encode_frame_features(s, schema, bad)),
                         doctest::Contains("mismatch"), DataError);
  }
  SUBCASE("unknown feature names are config errors") {
    CHECK_THROWS_AS(
        static_cast<void>(ScoreFeatureSchema::parse("version 1\nnumeric no_such_feature\n", inv())),
        ConfigError);
  }
  SUBCASE("kind mismatch against the registry is a config error") {
    CHECK_THROWS_AS(
        static_cast<void>(ScoreFeatureSchema::parse("version 1\nnumeric phoneme\n", inv())),
        ConfigError);
  }
}

TEST_CASE("feature levels nest: frame features are rejected at note level") {
  ScoreFeatureSchema schema =
      ScoreFeatureSchema::parse("version 1\nnumeric frac_in_phoneme\n", inv());
  Score s = make_score({note(0, 69, 4, "a")});
  CHECK_THROWS_AS(static_cast<void>(encode_note_features(s, schema)), ConfigError);
}

TEST_CASE("schema hash changes with content and survives a save/load cycle") {
  ScoreFeatureSchema a = ScoreFeatureSchema::parse(
      "version 1\nnumeric note_pitch\ncategorical phoneme_class vowel consonant breath silence\n",
      inv());
  ScoreFeatureSchema b =
      ScoreFeatureSchema::parse("version 1\nnumeric note_pitch\n", inv());
  CHECK(a.hash() != b.hash());
  ScoreFeatureSchema a2 = ScoreFeatureSchema::parse(a.serialize(), inv());
  CHECK(a2.hash() == a.hash());
}

TEST_CASE("total frames equal pitch-sequence and feature-sequence lengths") {
  Score s = make_score({note(0, 60, 13, "ka"), note(1, NoteEvent::kRestPitch, 7, ""),
                        note(2, 64, 21, "a")});
  PhonemeAlignment ali;
  ali.segments = {{0, 6, "k"}, {6, 13, "a"}, {13, 20, "sil"}, {20, 41, "a"}};
  auto seq = note_pitch_sequence(s);
  ScoreFeatureSchema schema = ScoreFeatureSchema::parse("version 1\nnumeric note_length\n", inv());
  Matrix m = encode_frame_features(s, schema, ali);
  CHECK(static_cast<int>(seq.cents.size()) == s.total_frames());
  CHECK(static_cast<int>(m.rows) == s.total_frames());
}
