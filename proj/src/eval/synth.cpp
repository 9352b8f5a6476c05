// eval/synth.cpp

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

#include "cantus/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cantus {

std::uint64_t SynthRng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SynthRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SynthRng::normal(double sigma) {
  if (sigma == 0.0) return 0.0;
  if (have_spare_) {
    have_spare_ = false;
    return spare_ * sigma;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta) * sigma;
}

int SynthRng::uniform_int(int lo, int hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

int min_segments(const NoteEvent& note) {
  return note.is_rest() ? 1 : static_cast<int>(note.phonemes.size());
}

}  // namespace

SyntheticSong generate_synthetic_song(const SynthSpec& spec) {
  if (spec.notes.empty()) throw DataError("synth: empty note plan");
  if (!spec.detune_cents.empty() && spec.detune_cents.size() != spec.notes.size())
    throw DataError("synth: detune list does not match the note plan");
  if (!spec.vibrato_mask.empty() && spec.vibrato_mask.size() != spec.notes.size())
    throw DataError("synth: vibrato mask does not match the note plan");

  static const PhonemeInventory inv = PhonemeInventory::default_japanese();
  SynthRng rng(spec.seed);
  SyntheticSong song;

  // Score.
  song.score.tempo_bpm = spec.tempo_bpm;
  song.score.frame_shift_s = spec.frame_shift_s;
  const int N = static_cast<int>(spec.notes.size());
  for (int n = 0; n < N; ++n) {
    const SynthNoteSpec& ns = spec.notes[n];
    NoteEvent note;
    note.index = n;
    note.midi_pitch = ns.midi;
    note.length_frames = ns.length_frames;
    if (note.length_frames < 1) throw DataError("synth: note shorter than one frame");
    if (!note.is_rest()) {
      note.syllable = ns.syllable;
      note.phonemes = inv.phonemize(ns.syllable);
      // the generator only models V / CV notes
      int vowels = 0;
      for (const auto& p : note.phonemes) vowels += p.cls == PhonemeClass::Vowel;
      if (vowels != 1 || note.phonemes.size() > 2 ||
          (note.phonemes.size() == 2 && note.phonemes[0].cls != PhonemeClass::Consonant))
        throw DataError("synth: syllable `" + ns.syllable + "` is not V or CV");
    }
    song.score.notes.push_back(std::move(note));
  }
  song.score.validate();
  const int T = song.score.total_frames();

  // Note heads h[n] (start of the note's first phoneme) and vowel onsets.
  std::vector<int> score_start(N + 1, 0);
  for (int n = 0; n < N; ++n) score_start[n + 1] = score_start[n] + spec.notes[n].length_frames;

  std::vector<int> lag(N, 0), c_len(N, 0);
  for (int n = 0; n < N; ++n) {
    if (n > 0) {
      int max_abs = std::min(spec.notes[n - 1].length_frames, spec.notes[n].length_frames) / 3;
      int l = static_cast<int>(std::llround(rng.normal(spec.lag_sigma_frames)));
      lag[n] = std::clamp(l, -max_abs, max_abs);
    }
    const NoteEvent& note = song.score.notes[n];
    if (!note.is_rest() && note.phonemes.size() == 2) {
      int c = static_cast<int>(std::llround(
          spec.consonant_frames + rng.normal(spec.consonant_jitter_frames)));
      c_len[n] = std::clamp(c, 2, std::max(2, note.length_frames / 2));
    }
  }

  std::vector<int> head(N + 1, 0), v_onset(N, 0);
  head[N] = T;
  // minimum frames needed from note n to the end
  std::vector<int> need_from(N + 1, 0);
  for (int n = N - 1; n >= 0; --n) need_from[n] = need_from[n + 1] + min_segments(song.score.notes[n]);
  for (int n = 1; n < N; ++n) {
    int desired = score_start[n] + lag[n] - c_len[n];
    int lo = head[n - 1] + min_segments(song.score.notes[n - 1]);
    int hi = T - need_from[n];
    head[n] = std::clamp(desired, lo, std::min(hi, std::max(lo, hi)));
  }
  for (int n = 0; n < N; ++n) {
    int span_end = head[n + 1];
    if (c_len[n] > 0) {
      c_len[n] = std::min(c_len[n], span_end - head[n] - 1);  // vowel keeps >= 1 frame
      v_onset[n] = head[n] + c_len[n];
    } else {
      v_onset[n] = head[n];
    }
  }

  // Alignment segments.
  for (int n = 0; n < N; ++n) {
    const NoteEvent& note = song.score.notes[n];
    int s = head[n], e = head[n + 1];
    if (note.is_rest()) {
      song.alignment.segments.push_back({s, e, "sil"});
    } else if (note.phonemes.size() == 2) {
      song.alignment.segments.push_back({s, v_onset[n], note.phonemes[0].symbol});
      song.alignment.segments.push_back({v_onset[n], e, note.phonemes[1].symbol});
    } else {
      song.alignment.segments.push_back({s, e, note.phonemes[0].symbol});
    }
    song.ledger.lag_per_note.push_back(
        static_cast<double>((note.is_rest() ? s : v_onset[n]) - score_start[n]));
  }
  song.alignment.validate();

  // F0 components. Pitch (and detune) change at vowel onsets and hold
  // through rests and the next note's consonant lead.
  SynthLedger& led = song.ledger;
  led.note_stair.assign(T, 0.0);
  led.detune.assign(T, 0.0);
  led.transient.assign(T, 0.0);
  led.vibrato.assign(T, 0.0);
  led.noise.assign(T, 0.0);
  led.detune_per_note.assign(N, 0.0);
  for (int n = 0; n < N; ++n) {
    if (!song.score.notes[n].is_rest() && !spec.detune_cents.empty())
      led.detune_per_note[n] = spec.detune_cents[n];
  }

  struct Anchor {
    int frame;
    double pitch, detune;
    int note;
  };
  std::vector<Anchor> anchors;
  for (int n = 0; n < N; ++n) {
    if (song.score.notes[n].is_rest()) continue;
    anchors.push_back({v_onset[n], song.score.notes[n].pitch_cents(), led.detune_per_note[n], n});
  }
  if (anchors.empty()) throw DataError("synth: no non-rest notes");
  for (int t = 0; t < T; ++t) {
    const Anchor* cur = &anchors.front();
    for (const auto& a : anchors) {
      if (a.frame <= t) cur = &a;
      else break;
    }
    led.note_stair[t] = cur->pitch;
    led.detune[t] = cur->detune;
  }

  // Overshoot / preparation around adjacent non-rest note changes.
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (anchors[i].note != anchors[i - 1].note + 1) continue;  // rest between
    double delta = anchors[i].pitch - anchors[i - 1].pitch;
    if (delta == 0.0) continue;
    double dir = delta > 0.0 ? 1.0 : -1.0;
    int b = anchors[i].frame;
    if (spec.overshoot_cents > 0.0) {
      for (int j = 0; j < 5 * spec.overshoot_decay_frames && b + j < T; ++j) {
        led.transient[b + j] += dir * spec.overshoot_cents *
                                std::exp(-static_cast<double>(j) / spec.overshoot_decay_frames);
      }
    }
    if (spec.preparation_cents > 0.0) {
      for (int j = 1; j <= 5 * spec.preparation_decay_frames && b - j >= 0; ++j) {
        led.transient[b - j] += -dir * spec.preparation_cents *
                                std::exp(-static_cast<double>(j) / spec.preparation_decay_frames);
      }
    }
  }

  // Vibrato inside eligible notes.
  for (int n = 0; n < N; ++n) {
    const NoteEvent& note = song.score.notes[n];
    if (note.is_rest()) continue;
    if (!spec.vibrato_mask.empty() && !spec.vibrato_mask[n]) continue;
    int s = v_onset[n], e = head[n + 1];
    if (spec.vibrato_amp_cents <= 0.0 || e - s < spec.vibrato_min_note_frames) continue;
    int onset = s + static_cast<int>(std::llround(spec.vibrato_onset_frac * (e - s)));
    for (int t = onset; t < e; ++t) {
      double phase = 2.0 * std::numbers::pi * spec.vibrato_rate_hz * spec.frame_shift_s * (t - onset);
      led.vibrato[t] = spec.vibrato_amp_cents * std::sin(phase);
    }
  }

  // Voicing and noise.
  song.f0.cents.assign(T, 0.0);
  song.f0.voiced.assign(T, 1);
  for (const auto& seg : song.alignment.segments) {
    if (seg.phoneme == "sil") {
      for (int t = seg.start_frame; t < seg.end_frame; ++t) song.f0.voiced[t] = 0;
    }
  }
  for (int t = 0; t < T; ++t) {
    if (song.f0.voiced[t]) led.noise[t] = rng.normal(spec.noise_sigma_cents);
    song.f0.cents[t] =
        led.note_stair[t] + led.detune[t] + led.transient[t] + led.vibrato[t] + led.noise[t];
  }

  // Deterministic smooth spectra per phoneme class.
  if (spec.mgc_dims > 0) {
    song.mgc = Matrix(T, spec.mgc_dims);
    for (const auto& seg : song.alignment.segments) {
      double cls = static_cast<double>(static_cast<int>(inv.classify(seg.phoneme)));
      for (int t = seg.start_frame; t < seg.end_frame; ++t) {
        for (int d = 0; d < spec.mgc_dims; ++d) {
          song.mgc.at(t, d) = 0.3 * std::sin(0.013 * t * (d + 1)) + 0.2 * cls;
        }
      }
    }
  }
  return song;
}

std::vector<SyntheticSong> generate_corpus(const CorpusSpec& spec) {
  static const char* kSyllables[] = {"a", "ka", "sa", "ta", "na", "ha", "ma", "ra"};
  std::vector<SyntheticSong> songs;
  SynthRng rng(spec.seed);
  for (int s = 0; s < spec.num_songs; ++s) {
    SynthSpec ss;
    ss.seed = spec.seed * 1000003ull + static_cast<std::uint64_t>(s) + 1;
    ss.vibrato_amp_cents = spec.vibrato_amp_cents;
    ss.vibrato_rate_hz = spec.vibrato_rate_hz;
    ss.overshoot_cents = spec.overshoot_cents;
    ss.preparation_cents = spec.preparation_cents;
    ss.noise_sigma_cents = spec.noise_sigma_cents;
    ss.lag_sigma_frames = spec.lag_sigma_frames;
    ss.consonant_jitter_frames = spec.consonant_jitter_frames;
    ss.mgc_dims = spec.mgc_dims;

    ss.notes.push_back({NoteEvent::kRestPitch, spec.rest_frames, ""});
    int midi = (spec.midi_low + spec.midi_high) / 2;
    for (int n = 0; n < spec.notes_per_song; ++n) {
      if (n > 0 && rng.uniform() < spec.rest_probability) {
        ss.notes.push_back({NoteEvent::kRestPitch, spec.rest_frames, ""});
      }
      midi += rng.uniform_int(-3, 3);
      midi = std::clamp(midi, spec.midi_low, spec.midi_high);
      SynthNoteSpec note;
      note.midi = midi;
      note.length_frames = rng.uniform_int(spec.min_note_frames, spec.max_note_frames);
      note.syllable = kSyllables[rng.uniform_int(0, 7)];
      ss.notes.push_back(note);
    }

    ss.detune_cents.assign(ss.notes.size(), 0.0);
    ss.vibrato_mask.assign(ss.notes.size(), 0);
    for (std::size_t n = 0; n < ss.notes.size(); ++n) {
      if (ss.notes[n].midi == NoteEvent::kRestPitch) continue;
      if (spec.detune_sigma_cents > 0.0) {
        double d = rng.normal(spec.detune_sigma_cents);
        ss.detune_cents[n] = std::clamp(d, -spec.detune_clip_cents, spec.detune_clip_cents);
      }
      ss.vibrato_mask[n] = rng.uniform() < spec.vibrato_probability ? 1 : 0;
    }
    songs.push_back(generate_synthetic_song(ss));
  }
  return songs;
}

}  // namespace cantus
