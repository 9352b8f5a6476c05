// tests/test_f0.cpp

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

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cantus/f0.h"
#include "cantus/metrics.h"
#include "cantus/synth.h"

using namespace cantus;

namespace {

F0Track track_of(std::vector<double> cents, std::vector<std::uint8_t> voiced = {}) {
  F0Track t;
  t.cents = std::move(cents);
  t.voiced = voiced.empty() ? std::vector<std::uint8_t>(t.cents.size(), 1) : std::move(voiced);
  return t;
}

// constant base + sinusoid, 5 ms frames
F0Track sinusoid_track(double base, double amp, double rate_hz, int frames,
                       double frame_shift = 0.005) {
  F0Track t;
  for (int i = 0; i < frames; ++i) {
    t.cents.push_back(base + amp * std::sin(2.0 * std::numbers::pi * rate_hz * frame_shift * i));
    t.voiced.push_back(1);
  }
  return t;
}

}  // namespace

TEST_CASE("unvoiced interpolation: ramps, identity, edge holds") {
  SUBCASE("interior gap ramps linearly") {
    F0Track t = track_of({100, 0, 0, 400}, {1, 0, 0, 1});
    F0Track out = interpolate_unvoiced(t);
    CHECK(out.cents == std::vector<double>{100, 200, 300, 400});
    CHECK(out.voiced == std::vector<std::uint8_t>{1, 0, 0, 1});  // mask retained
  }
  SUBCASE("all-voiced is the identity") {
    F0Track t = track_of({5, 6, 7});
    CHECK(interpolate_unvoiced(t).cents == t.cents);
  }
  SUBCASE("leading run holds the first voiced value") {
    F0Track t = track_of({0, 0, 250}, {0, 0, 1});
    CHECK(interpolate_unvoiced(t).cents == std::vector<double>{250, 250, 250});
  }
  SUBCASE("fully unvoiced is an error") {
    F0Track t = track_of({0, 0}, {0, 0});
    CHECK_THROWS_AS(interpolate_unvoiced(t), DataError);
  }
  SUBCASE("idempotent and exact on voiced frames") {
    F0Track t = track_of({10, 0, 30, 0, 0, 90}, {1, 0, 1, 0, 0, 1});
    F0Track once = interpolate_unvoiced(t);
    F0Track twice = interpolate_unvoiced(once);
    CHECK(once.cents == twice.cents);
    CHECK(once.cents[0] == 10.0);
    CHECK(once.cents[2] == 30.0);
    CHECK(once.cents[5] == 90.0);
  }
}

TEST_CASE("median smoothing") {
  SUBCASE("constant track is unchanged") {
    std::vector<double> x(50, 7.0);
    CHECK(median_smooth(x, 5) == x);
  }
  SUBCASE("a lone spike is removed") {
    std::vector<double> x(21, 1.0);
    x[10] = 500.0;
    auto y = median_smooth(x, 5);
    for (double v : y) CHECK(v == 1.0);
  }
  SUBCASE("a full vibrato cycle inside the window medians back to the base") {
    F0Track t = sinusoid_track(300.0, 100.0, 5.0, 200);
    auto y = median_smooth(t.cents, 45);  // 225 ms > one period at 5 Hz
    for (int i = 30; i < 170; ++i) CHECK(std::abs(y[i] - 300.0) < 5.0);
  }
  SUBCASE("even windows are rejected") {
    std::vector<double> x(10, 0.0);
    CHECK_THROWS_AS(static_cast<void>(median_smooth(x, 4)), ConfigError);
    CHECK_THROWS_AS(static_cast<void>(smooth_f0(track_of({1, 2, 3}), 1)), ConfigError);
  }
}

TEST_CASE("sine vibrato extraction recovers synthetic parameters") {
  SUBCASE("a pure 5 Hz, 100-cent sinusoid is one section with the right params") {
    F0Track t = sinusoid_track(0.0, 100.0, 5.0, 200);  // 1 s
    auto [params, sections] = extract_vibrato_sine(t, 0.005);
    REQUIRE(sections.size() == 1);

    double amp_sum = 0, rate_sum = 0;
    int n = 0;
    for (int i = sections[0].start_frame; i < sections[0].end_frame; ++i) {
      amp_sum += params.m_a[i];
      rate_sum += params.m_f[i];
      ++n;
    }
    CHECK(std::abs(rate_sum / n - 5.0) <= 0.25);
    CHECK(std::abs(amp_sum / n - 100.0) <= 10.0);
    for (int i = sections[0].start_frame; i < sections[0].end_frame; ++i)
      CHECK(params.vib_flag[i]);
  }
  SUBCASE("across the acceptance amplitude/rate grid") {
    for (double amp : {50.0, 100.0, 150.0}) {
      for (double rate : {5.0, 6.0, 7.0}) {
        CAPTURE(amp);
        CAPTURE(rate);
        F0Track t = sinusoid_track(100.0, amp, rate, 300);
        auto [params, sections] = extract_vibrato_sine(t, 0.005);
        REQUIRE(!sections.empty());
        double amp_sum = 0, rate_sum = 0;
        int n = 0;
        for (const auto& sec : sections) {
          for (int i = sec.start_frame; i < sec.end_frame; ++i) {
            amp_sum += params.m_a[i];
            rate_sum += params.m_f[i];
            ++n;
          }
        }
        CHECK(std::abs(rate_sum / n - rate) <= 0.25);
        CHECK(std::abs(amp_sum / n - amp) <= 10.0);
      }
    }
  }
  SUBCASE("constant F0 has no sections") {
    F0Track t = track_of(std::vector<double>(200, 440.0));
    auto [params, sections] = extract_vibrato_sine(t, 0.005);
    CHECK(sections.empty());
    for (auto f : params.vib_flag) CHECK(!f);
  }
  SUBCASE("slow drift below F_min is rejected") {
    F0Track t = sinusoid_track(0.0, 100.0, 0.5, 400);
    auto [params, sections] = extract_vibrato_sine(t, 0.005);
    CHECK(sections.empty());
  }
  SUBCASE("tiny wobble below A_min is rejected") {
    F0Track t = sinusoid_track(0.0, 10.0, 5.0, 400);
    auto [params, sections] = extract_vibrato_sine(t, 0.005);
    CHECK(sections.empty());
  }
}

TEST_CASE("sine vibrato rendering evaluates the pointwise formula") {
  SUBCASE("quarter-phase peak: sin(2.5 pi) = 1 -> +100 cents") {
    SineVibratoParams p;
    p.m_a.assign(100, 100.0);
    p.m_f.assign(100, 5.0);
    p.vib_flag.assign(100, 1);
    auto v = render_vibrato_sine(p, {{0, 100}}, 0.005);
    // t - t_s = 50: 2 pi * 5 * 0.005 * 50 = 2.5 pi
    CHECK(v[50] == doctest::Approx(100.0));
    CHECK(v[0] == doctest::Approx(0.0));  // phase origin
  }
  SUBCASE("zero amplitude renders zeros") {
    SineVibratoParams p;
    p.m_a.assign(10, 0.0);
    p.m_f.assign(10, 6.0);
    p.vib_flag.assign(10, 1);
    auto v = render_vibrato_sine(p, {{0, 10}}, 0.005);
    for (double x : v) CHECK(x == 0.0);
  }
  SUBCASE("output is bounded by the maximum amplitude") {
    SineVibratoParams p;
    p.m_a = {40, 80, 120, 80, 40, 20, 10, 5, 2, 1};
    p.m_f.assign(10, 7.0);
    p.vib_flag.assign(10, 1);
    auto v = render_vibrato_sine(p, {{0, 10}}, 0.005);
    for (double x : v) CHECK(std::abs(x) <= 120.0);
  }
  SUBCASE("frames outside sections are zero") {
    SineVibratoParams p;
    p.m_a.assign(30, 100.0);
    p.m_f.assign(30, 5.0);
    p.vib_flag.assign(30, 0);
    auto v = render_vibrato_sine(p, {{10, 20}}, 0.005);
    for (int t = 0; t < 10; ++t) CHECK(v[t] == 0.0);
    for (int t = 20; t < 30; ++t) CHECK(v[t] == 0.0);
  }
  SUBCASE("overlapping sections are rejected") {
    SineVibratoParams p;
    p.m_a.assign(30, 100.0);
    p.m_f.assign(30, 5.0);
    p.vib_flag.assign(30, 1);
    CHECK_THROWS_AS(static_cast<void>(render_vibrato_sine(p, {{0, 15}, {10, 25}}, 0.005)),
                    DataError);
  }
}

TEST_CASE("difference vibrato is an exact additive decomposition") {
  SynthRng rng(31);
  SUBCASE("smoothed + diff reconstructs the original bitwise") {
    for (int trial = 0; trial < 10; ++trial) {
      F0Track t;
      int n = 20 + static_cast<int>(rng.uniform() * 200);
      for (int i = 0; i < n; ++i) {
        t.cents.push_back(rng.normal(200.0));
        t.voiced.push_back(1);
      }
      auto [vib, smoothed] = extract_vibrato_diff(t, 45);
      for (int i = 0; i < n; ++i) {
        CHECK(smoothed.cents[i] + vib.diff[i] == t.cents[i]);  // exact
      }
    }
  }
  SUBCASE("constant track has zero diff") {
    F0Track t = track_of(std::vector<double>(60, 123.0));
    auto [vib, smoothed] = extract_vibrato_diff(t, 9);
    for (double d : vib.diff) CHECK(d == 0.0);
  }
  SUBCASE("diff correlates with the injected sinusoid") {
    F0Track t = sinusoid_track(700.0, 80.0, 6.0, 300);
    auto [vib, smoothed] = extract_vibrato_diff(t, 45);
    std::vector<double> injected(300);
    for (int i = 0; i < 300; ++i) injected[i] = t.cents[i] - 700.0;
    CHECK(pearson_corr(vib.diff, injected) > 0.95);
  }
  SUBCASE("scaling the diff scales the vibrato excursion exactly") {
    F0Track t = sinusoid_track(700.0, 80.0, 6.0, 300);
    auto [vib, smoothed] = extract_vibrato_diff(t, 45);
    const double alpha = 0.37;
    for (int i = 0; i < 300; ++i) {
      double rec = smoothed.cents[i] + alpha * vib.diff[i];
      CHECK(rec - smoothed.cents[i] == doctest::Approx(alpha * (t.cents[i] - smoothed.cents[i])));
    }
  }
}

TEST_CASE("pitch normalization and denormalization") {
  NotePitchSequence p;
  p.cents = {0.0, 0.0, 100.0, 100.0};
  p.rest_mask = {0, 0, 0, 0};

  SUBCASE("residual is the difference from the note pitch") {
    F0Track t = track_of({50.0, 50.0, 150.0, 120.0});
    auto mu = pitch_normalize(t, p);
    CHECK(mu == std::vector<double>{50.0, 50.0, 50.0, 20.0});
  }
  SUBCASE("denormalize(normalize(x)) is the identity") {
    F0Track t = track_of({12.5, -3.0, 180.0, 99.0});
    auto mu = pitch_normalize(t, p);
    F0Track back = pitch_denormalize(mu, p);
    CHECK(back.cents == t.cents);
  }
  SUBCASE("bias adds on top of the residual") {
    std::vector<double> mu = {10.0, 10.0, 10.0, 10.0};
    std::vector<double> bias = {0.0, 0.0, 30.0, 30.0};
    F0Track out = pitch_denormalize(mu, p, &bias);
    CHECK(out.cents == std::vector<double>{10.0, 10.0, 140.0, 140.0});
  }
  SUBCASE("length mismatch is an error") {
    F0Track t = track_of({1.0});
    CHECK_THROWS_AS(static_cast<void>(pitch_normalize(t, p)), DataError);
  }
}

TEST_CASE("F0 file round trip through Hz with unvoiced zeros") {
  F0Track t;
  t.cents = {0.0, 1200.0, 0.0};
  t.voiced = {1, 1, 0};
  auto hz = t.to_hz();
  CHECK(hz[0] == doctest::Approx(440.0));
  CHECK(hz[1] == doctest::Approx(880.0));
  CHECK(hz[2] == 0.0);
  F0Track back = F0Track::from_hz(hz);
  CHECK(back.voiced == t.voiced);
  CHECK(back.cents[0] == doctest::Approx(0.0));
  CHECK(back.cents[1] == doctest::Approx(1200.0));
}
