// cantus/f0.h

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

#ifndef CANTUS_F0_H_
#define CANTUS_F0_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cantus/common.h"
#include "cantus/score.h"

namespace cantus {

// Log-scale pitch track in cents (A4 = 440 Hz = 0 cents) with a voicing
// mask. File format: one F0 value in Hz per line, 0.0 = unvoiced.
struct F0Track {
  std::vector<double> cents;
  std::vector<std::uint8_t> voiced;

  int frames() const { return static_cast<int>(cents.size()); }
  static F0Track from_hz(const std::vector<double>& hz);
  std::vector<double> to_hz() const;  // unvoiced frames -> 0.0
  static F0Track load(const std::string& path);
  void save(const std::string& path) const;
};

// Linear interpolation across unvoiced spans (edges held constant). The
// voicing mask is kept as-is so metrics can still select voiced frames.
F0Track interpolate_unvoiced(const F0Track& track);

// Running median with edge-truncated windows; window must be odd and >= 3.
std::vector<double> median_smooth(const std::vector<double>& x, int window_frames);
F0Track smooth_f0(const F0Track& track, int window_frames);

struct VibratoSection {
  int start_frame = 0;
  int end_frame = 0;  // half-open
};

// Sinusoidal vibrato parameters: amplitude in cents, rate in Hz, section
// flag. Amplitude/rate are interpolated outside vibrato sections the same
// way unvoiced F0 is.
struct SineVibratoParams {
  std::vector<double> m_a;
  std::vector<double> m_f;
  std::vector<std::uint8_t> vib_flag;
};

// Detection thresholds (implementer constants, config-exposed): a run of at
// least min_half_cycles consecutive half-cycles whose amplitude lies in
// [a_min, a_max] cents and rate in [f_min, f_max] Hz forms a section.
struct VibratoThresholds {
  double a_min = 30.0;
  double a_max = 300.0;
  double f_min = 4.0;
  double f_max = 9.0;
  int min_half_cycles = 3;
  int median_window = 45;
};

// Half-cycles are delimited by the (fractionally interpolated) intersection
// points of the track with its median-smoothed version; per half-cycle
// amplitude is max |F0 - smoothed| and rate is 1 / (2 * width * frame_shift).
std::pair<SineVibratoParams, std::vector<VibratoSection>> extract_vibrato_sine(
    const F0Track& interpolated, double frame_shift_s,
    const VibratoThresholds& thresholds = {});

// v(t) = m_a(t) * sin(2 pi m_f(t) f_s (t - t_start)) inside sections, 0
// outside. Sections must be disjoint.
std::vector<double> render_vibrato_sine(const SineVibratoParams& params,
                                        const std::vector<VibratoSection>& sections,
                                        double frame_shift_s);

// Difference vibrato: original minus median-smoothed, an exact additive
// decomposition.
struct DiffVibrato {
  std::vector<double> diff;
};

std::pair<DiffVibrato, F0Track> extract_vibrato_diff(const F0Track& track,
                                                     int window_frames);

// residual = track - p ; denormalize = p + mu (+ bias).
std::vector<double> pitch_normalize(const F0Track& track, const NotePitchSequence& p);
F0Track pitch_denormalize(const std::vector<double>& mu, const NotePitchSequence& p,
                          const std::vector<double>* bias = nullptr);

}  // namespace cantus

#endif  // CANTUS_F0_H_
