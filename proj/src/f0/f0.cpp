// f0/f0.cpp

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

#include "cantus/f0.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cantus/kernels.h"

namespace cantus {

F0Track F0Track::from_hz(const std::vector<double>& hz) {
  F0Track track;
  track.cents.reserve(hz.size());
  track.voiced.reserve(hz.size());
  for (double h : hz) {
    if (h > 0.0) {
      track.cents.push_back(hz_to_cents(h));
      track.voiced.push_back(1);
    } else {
      track.cents.push_back(0.0);
      track.voiced.push_back(0);
    }
  }
  return track;
}

std::vector<double> F0Track::to_hz() const {
  std::vector<double> hz(cents.size(), 0.0);
  for (std::size_t t = 0; t < cents.size(); ++t) {
    if (voiced[t]) hz[t] = cents_to_hz(cents[t]);
  }
  return hz;
}

F0Track F0Track::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open F0 file: " + path);
  std::vector<double> hz;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      hz.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw DataError("F0 file " + path + " line " + std::to_string(lineno) + ": not a number");
    }
  }
  return from_hz(hz);
}

void F0Track::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write F0 file: " + path);
  char buf[64];
  for (double h : to_hz()) {
    std::snprintf(buf, sizeof buf, "%.6f\n", h);
    out << buf;
  }
}

F0Track interpolate_unvoiced(const F0Track& track) {
  const int T = track.frames();
  bool any = false;
  for (auto v : track.voiced) any |= (v != 0);
  if (!any) throw DataError("interpolate_unvoiced: fully unvoiced track");

  F0Track out = track;
  int t = 0;
  while (t < T) {
    if (track.voiced[t]) {
      ++t;
      continue;
    }
    int run_start = t;
    while (t < T && !track.voiced[t]) ++t;
    int run_end = t;  // half-open
    int left = run_start - 1;
    int right = run_end < T ? run_end : -1;
    if (left < 0 && right < 0) continue;
    if (left < 0) {
      for (int i = run_start; i < run_end; ++i) out.cents[i] = track.cents[right];
    } else if (right < 0) {
      for (int i = run_start; i < run_end; ++i) out.cents[i] = track.cents[left];
    } else {
      double a = track.cents[left], b = track.cents[right];
      double span = right - left;
      for (int i = run_start; i < run_end; ++i) {
        out.cents[i] = a + (b - a) * (i - left) / span;
      }
    }
  }
  return out;
}

std::vector<double> median_smooth(const std::vector<double>& x, int window_frames) {
  if (window_frames < 3 || window_frames % 2 == 0)
    throw ConfigError("median window must be odd and >= 3");
  const int T = static_cast<int>(x.size());
  const int half = window_frames / 2;
  std::vector<double> out(T);
  std::vector<double> buf;
  buf.reserve(window_frames);
  for (int t = 0; t < T; ++t) {
    int lo = std::max(0, t - half);
    int hi = std::min(T - 1, t + half);
    buf.assign(x.begin() + lo, x.begin() + hi + 1);
    std::size_t mid = buf.size() / 2;
    std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
    double med = buf[mid];
    if (buf.size() % 2 == 0) {
      // even truncated window at the edges: average the two central values
      std::nth_element(buf.begin(), buf.begin() + mid - 1, buf.begin() + mid);
      med = 0.5 * (med + buf[mid - 1]);
    }
    out[t] = med;
  }
  return out;
}

F0Track smooth_f0(const F0Track& track, int window_frames) {
  F0Track out = track;
  out.cents = median_smooth(track.cents, window_frames);
  return out;
}

namespace {

// Linear interpolation of values defined on a sparse set of frames, edges
// held; mirrors interpolate_unvoiced.
std::vector<double> interpolate_sparse(int T, const std::vector<int>& frames,
                                       const std::vector<double>& values,
                                       double fallback) {
  std::vector<double> out(T, fallback);
  if (frames.empty()) return out;
  for (int t = 0; t <= frames.front(); ++t) out[t] = values.front();
  for (int t = frames.back(); t < T; ++t) out[t] = values.back();
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    int a = frames[i], b = frames[i + 1];
    for (int t = a; t <= b; ++t) {
      double f = b > a ? static_cast<double>(t - a) / (b - a) : 0.0;
      out[t] = values[i] + f * (values[i + 1] - values[i]);
    }
  }
  return out;
}

}  // namespace

std::pair<SineVibratoParams, std::vector<VibratoSection>> extract_vibrato_sine(
    const F0Track& interpolated, double frame_shift_s,
    const VibratoThresholds& th) {
  const int T = interpolated.frames();
  SineVibratoParams params;
  params.m_a.assign(T, 0.0);
  params.m_f.assign(T, 0.0);
  params.vib_flag.assign(T, 0);
  std::vector<VibratoSection> sections;
  if (T < 3) return {params, sections};

  std::vector<double> smoothed = median_smooth(interpolated.cents, th.median_window);
  std::vector<double> diff(T);
  kernels::sub(interpolated.cents.data(), smoothed.data(), diff.data(), T);

  // Fractional zero crossings of diff.
  std::vector<double> crossings;
  for (int t = 0; t + 1 < T; ++t) {
    double a = diff[t], b = diff[t + 1];
    if (a == 0.0) {
      crossings.push_back(t);
    } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      crossings.push_back(t + a / (a - b));
    }
  }
  if (crossings.size() < 2) return {params, sections};

  struct HalfCycle {
    double start, end;
    double amp, rate;
    bool ok;
  };
  std::vector<HalfCycle> cycles;
  for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
    double x0 = crossings[i], x1 = crossings[i + 1];
    if (x1 <= x0) continue;
    double amp = 0.0;
    for (int t = static_cast<int>(std::ceil(x0)); t <= static_cast<int>(std::floor(x1)); ++t) {
      amp = std::max(amp, std::abs(diff[t]));
    }
    double rate = 1.0 / (2.0 * (x1 - x0) * frame_shift_s);
    bool ok = amp >= th.a_min && amp <= th.a_max && rate >= th.f_min && rate <= th.f_max;
    cycles.push_back({x0, x1, amp, rate, ok});
  }

  // Runs of >= min_half_cycles qualifying half-cycles become sections.
  std::size_t i = 0;
  while (i < cycles.size()) {
    if (!cycles[i].ok) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cycles.size() && cycles[j].ok) ++j;
    if (static_cast<int>(j - i) >= th.min_half_cycles) {
      int s = static_cast<int>(std::ceil(cycles[i].start));
      int e = static_cast<int>(std::floor(cycles[j - 1].end)) + 1;
      e = std::min(e, T);
      if (s < e) {
        sections.push_back({s, e});
        for (int t = s; t < e; ++t) params.vib_flag[t] = 1;
      }
    }
    i = j;
  }

  // Parameters at half-cycle centers inside sections, interpolated
  // everywhere else like the F0 sequence.
  std::vector<int> center_frames;
  std::vector<double> amps, rates;
  for (const auto& c : cycles) {
    if (!c.ok) continue;
    int center = static_cast<int>(std::llround(0.5 * (c.start + c.end)));
    center = std::clamp(center, 0, T - 1);
    if (!params.vib_flag[center]) continue;
    if (!center_frames.empty() && center_frames.back() >= center) continue;
    center_frames.push_back(center);
    amps.push_back(c.amp);
    rates.push_back(c.rate);
  }
  double rate_fallback = 0.5 * (th.f_min + th.f_max);
  params.m_a = interpolate_sparse(T, center_frames, amps, 0.0);
  params.m_f = interpolate_sparse(T, center_frames, rates, rate_fallback);
  return {params, sections};
}

std::vector<double> render_vibrato_sine(const SineVibratoParams& params,
                                        const std::vector<VibratoSection>& sections,
                                        double frame_shift_s) {
  const int T = static_cast<int>(params.m_a.size());
  std::vector<VibratoSection> sorted = sections;
  std::sort(sorted.begin(), sorted.end(),
            [](const VibratoSection& a, const VibratoSection& b) { return a.start_frame < b.start_frame; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].end_frame > sorted[i + 1].start_frame)
      throw DataError("render_vibrato_sine: overlapping vibrato sections");
  }
  std::vector<double> v(T, 0.0);
  for (const auto& sec : sorted) {
    if (sec.start_frame < 0 || sec.end_frame > T || sec.start_frame >= sec.end_frame)
      throw DataError("render_vibrato_sine: bad section bounds");
    for (int t = sec.start_frame; t < sec.end_frame; ++t) {
      double phase = 2.0 * std::numbers::pi * params.m_f[t] * frame_shift_s *
                     (t - sec.start_frame);
      v[t] = params.m_a[t] * std::sin(phase);
    }
  }
  return v;
}

std::pair<DiffVibrato, F0Track> extract_vibrato_diff(const F0Track& track,
                                                     int window_frames) {
  F0Track smoothed = smooth_f0(track, window_frames);
  DiffVibrato vib;
  vib.diff.resize(track.cents.size());
  kernels::sub(track.cents.data(), smoothed.cents.data(), vib.diff.data(),
               track.cents.size());
  return {vib, smoothed};
}

std::vector<double> pitch_normalize(const F0Track& track, const NotePitchSequence& p) {
  if (track.cents.size() != p.cents.size())
    throw DataError("pitch_normalize: length mismatch");
  std::vector<double> mu(track.cents.size());
  kernels::sub(track.cents.data(), p.cents.data(), mu.data(), mu.size());
  return mu;
}

F0Track pitch_denormalize(const std::vector<double>& mu, const NotePitchSequence& p,
                          const std::vector<double>* bias) {
  if (mu.size() != p.cents.size() || (bias && bias->size() != mu.size()))
    throw DataError("pitch_denormalize: length mismatch");
  F0Track track;
  track.cents.resize(mu.size());
  kernels::add(p.cents.data(), mu.data(), track.cents.data(), mu.size());
  if (bias) kernels::add(track.cents.data(), bias->data(), track.cents.data(), mu.size());
  track.voiced.assign(mu.size(), 1);
  return track;
}

}  // namespace cantus
