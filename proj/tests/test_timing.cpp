// tests/test_timing.cpp

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
#include <numeric>

#include "doctest.h"

#include "cantus/synth.h"
#include "cantus/timing.h"
#include "oracles.h"

using namespace cantus;

namespace {

Score cv_score(const std::vector<std::pair<int, std::string>>& notes, int frames) {
  static const PhonemeInventory inv = PhonemeInventory::default_japanese();
  Score score;
  score.tempo_bpm = 120.0;
  int i = 0;
  for (const auto& [midi, syl] : notes) {
    NoteEvent n;
    n.index = i++;
    n.midi_pitch = midi;
    n.length_frames = frames;
    if (midi != NoteEvent::kRestPitch) {
      n.syllable = syl;
      n.phonemes = inv.phonemize(syl);
    }
    score.notes.push_back(n);
  }
  return score;
}

}  // namespace

TEST_CASE("adjusted note lengths follow the telescoping rule") {
  TimeLagVector g{{0.0, 10.0, -5.0}};
  auto adj = adjust_note_lengths({100, 100, 100}, g);
  CHECK(adj.frames == std::vector<double>{110.0, 85.0, 105.0});
  CHECK_FALSE(adj.repaired);

  SUBCASE("zero lags are the identity") {
    TimeLagVector zero{{0.0, 0.0, 0.0}};
    auto id = adjust_note_lengths({10, 20, 30}, zero);
    CHECK(id.frames == std::vector<double>{10.0, 20.0, 30.0});
  }
  SUBCASE("first lag must be zero") {
    TimeLagVector bad{{1.0, 0.0, 0.0}};
    CHECK_THROWS_AS(adjust_note_lengths({10, 20, 30}, bad), DataError);
  }
}

TEST_CASE("total frames are preserved for random lags (telescoping property)") {
  SynthRng rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform() * 12);
    std::vector<int> lengths(n);
    TimeLagVector g;
    g.lag_frames.assign(n, 0.0);
    long total = 0;
    for (int i = 0; i < n; ++i) {
      lengths[i] = 20 + static_cast<int>(rng.uniform() * 100);
      total += lengths[i];
      if (i > 0) g.lag_frames[i] = std::floor(rng.uniform() * 19.0) - 9.0;  // integer lags
    }
    auto adj = adjust_note_lengths(lengths, g, RepairMode::Repair);
    double sum = std::accumulate(adj.frames.begin(), adj.frames.end(), 0.0);
    CHECK(sum == static_cast<double>(total));  // exact in integer arithmetic
  }
}

TEST_CASE("infeasible adjusted lengths: error or flagged repair") {
  TimeLagVector g{{0.0, -20.0}};
  CHECK_THROWS_WITH_AS(static_cast<void>(adjust_note_lengths({10, 100}, g)),
                       doctest::Contains("infeasible time-lag"), DataError);

  auto adj = adjust_note_lengths({10, 100}, g, RepairMode::Repair);
  CHECK(adj.repaired);
  CHECK(adj.frames[0] >= 1.0);
  CHECK(adj.frames[0] + adj.frames[1] == doctest::Approx(110.0));
}

TEST_CASE("uniform allocation scales the means") {
  auto d = allocate_uniform(120.0, {20.0, 40.0});
  CHECK(d.frames == std::vector<int>{40, 80});

  SUBCASE("no scaling when the means already fit") {
    auto e = allocate_uniform(60.0, {20.0, 40.0});
    CHECK(e.frames == std::vector<int>{20, 40});
  }
  SUBCASE("zero mean sum is an error") {
    CHECK_THROWS_AS(allocate_uniform(10.0, {0.0, 0.0}), DataError);
  }
}

TEST_CASE("largest-remainder integerization matches the enumeration oracle") {
  // l=10, mu=[1,1,1]: all integer splits minimizing max|d - exact| are
  // {3,3,4} permutations; the lexicographically smallest is [3,3,4].
  auto d = allocate_uniform(10.0, {1.0, 1.0, 1.0});
  CHECK(d.frames == std::vector<int>{3, 3, 4});

  // oracle: enumerate all splits of 10 into 3 positive parts
  std::vector<int> best;
  double best_dev = 1e300;
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; a + b <= 9; ++b) {
      int c = 10 - a - b;
      if (c < 1) continue;
      double dev = std::max({std::abs(a - 10.0 / 3), std::abs(b - 10.0 / 3),
                             std::abs(c - 10.0 / 3)});
      std::vector<int> cand = {a, b, c};
      if (dev < best_dev - 1e-12 || (std::abs(dev - best_dev) <= 1e-12 && cand < best)) {
        best_dev = dev;
        best = cand;
      }
    }
  }
  CHECK(d.frames == best);
}

TEST_CASE("integerization keeps sums exact and enforces the 1-frame minimum") {
  SynthRng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 1 + static_cast<int>(rng.uniform() * 5);
    std::vector<double> mu(k);
    for (auto& m : mu) m = 0.05 + rng.uniform() * 30.0;
    double l_hat = std::max<double>(k, std::floor(10 + rng.uniform() * 100));
    auto d = allocate_uniform(l_hat, mu);
    int sum = std::accumulate(d.frames.begin(), d.frames.end(), 0);
    CHECK(sum == static_cast<int>(std::llround(l_hat)));
    for (int x : d.frames) CHECK(x >= 1);
  }
  CHECK_THROWS_AS(allocate_uniform(2.0, {1.0, 1.0, 1.0}), DataError);
}

TEST_CASE("ML allocation reproduces the closed form") {
  DurationDistribution dist{{30.0, 50.0}, {10.0, 40.0}};
  bool repaired = false;
  auto d = allocate_ml_real(100.0, dist, RepairMode::HardError, &repaired);
  // rho = (100 - 80) / 50 = 0.4
  CHECK(d[0] == doctest::Approx(34.0));
  CHECK(d[1] == doctest::Approx(66.0));
  CHECK_FALSE(repaired);

  SUBCASE("already-feasible means are untouched (rho = 0)") {
    auto e = allocate_ml_real(80.0, dist, RepairMode::HardError, nullptr);
    CHECK(e[0] == doctest::Approx(30.0));
    CHECK(e[1] == doctest::Approx(50.0));
  }
  SUBCASE("equal variances split the deficit equally") {
    DurationDistribution eq{{20.0, 40.0}, {5.0, 5.0}};
    auto e = allocate_ml_real(90.0, eq, RepairMode::HardError, nullptr);
    CHECK(e[0] == doctest::Approx(35.0));
    CHECK(e[1] == doctest::Approx(55.0));
  }
  SUBCASE("integerized result keeps the exact sum") {
    auto alloc = allocate_ml(100.0, dist);
    CHECK(alloc.frames == std::vector<int>{34, 66});
  }
}

TEST_CASE("ML allocation maximizes the likelihood (lattice search oracle)") {
  SynthRng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform() * 3);  // 2..4 phonemes
    DurationDistribution dist;
    for (int i = 0; i < k; ++i) {
      dist.mean.push_back(3.0 + rng.uniform() * 37.0);
      dist.var.push_back(0.5 + rng.uniform() * 24.5);
    }
    double sum_mu = std::accumulate(dist.mean.begin(), dist.mean.end(), 0.0);
    double l_hat = std::round((sum_mu + (rng.uniform() * 6.0 - 3.0)) * 100.0) / 100.0;
    if (l_hat < k) continue;

    auto d = allocate_ml_real(l_hat, dist, RepairMode::HardError, nullptr);
    double ours = cantus_test::allocation_objective(d, dist);
    double lattice = cantus_test::ml_alloc_lattice_dp(l_hat, dist);
    CHECK(ours >= lattice - 1e-9);        // continuous optimum dominates the grid
    CHECK(ours - lattice <= 0.01);        // and the grid comes within resolution

    if (k <= 3) {
      double brute = cantus_test::ml_alloc_lattice_bruteforce(l_hat, dist);
      CHECK(lattice == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("variance effect is monotone and equal-variance equals equal shares") {
  DurationDistribution dist{{10.0, 10.0, 10.0}, {2.0, 4.0, 8.0}};
  auto d = allocate_ml_real(44.0, dist, RepairMode::HardError, nullptr);
  // deviations proportional to variance
  CHECK((d[0] - 10.0) / 2.0 == doctest::Approx((d[1] - 10.0) / 4.0));
  CHECK((d[1] - 10.0) / 4.0 == doctest::Approx((d[2] - 10.0) / 8.0));

  DurationDistribution eq{{5.0, 25.0, 10.0}, {3.0, 3.0, 3.0}};
  auto e = allocate_ml_real(49.0, eq, RepairMode::HardError, nullptr);
  for (int i = 0; i < 3; ++i) CHECK(e[i] == doctest::Approx(eq.mean[i] + 3.0));

  // uniform allocation equals proportional shares by construction
  auto u = allocate_uniform_real(120.0, {10.0, 20.0, 30.0});
  CHECK(u[0] == doctest::Approx(20.0));
  CHECK(u[1] == doctest::Approx(40.0));
  CHECK(u[2] == doctest::Approx(60.0));
}

TEST_CASE("negative ML durations: hard error or flagged repair") {
  // rho = (20 - 63)/35 = -1.229 -> d0 = 3 - 36.9 < 0
  DurationDistribution tight{{3.0, 60.0}, {30.0, 5.0}};
  CHECK_THROWS_WITH_AS(static_cast<void>(allocate_ml_real(20.0, tight, RepairMode::HardError, nullptr)),
                       doctest::Contains("non-positive duration"), DataError);

  bool repaired = false;
  auto d = allocate_ml_real(20.0, tight, RepairMode::Repair, &repaired);
  CHECK(repaired);
  CHECK(d[0] == doctest::Approx(1.0));  // clamped at the minimum
  CHECK(d[0] + d[1] == doctest::Approx(20.0));
}

TEST_CASE("reference phonemes: first vowel, silence for rests, fallback first") {
  Score score = cv_score({{60, "ka"}, {NoteEvent::kRestPitch, ""}, {62, "a"}}, 50);
  // add a vowel-less note
  NoteEvent weird;
  weird.index = 3;
  weird.midi_pitch = 64;
  weird.length_frames = 50;
  weird.syllable = "n";
  weird.phonemes = {{"N", PhonemeClass::Consonant}};
  score.notes.push_back(weird);

  auto refs = reference_phonemes(score);
  CHECK(refs.ref_index == std::vector<int>{1, 0, 0, 0});
}

TEST_CASE("time-lag targets subtract score onsets from aligned reference onsets") {
  Score score = cv_score({{60, "ka"}, {62, "ka"}, {64, "a"}}, 100);
  auto refs = reference_phonemes(score);

  // note 1's consonant starts 8 frames before its score onset (inside note
  // 0's tail); its vowel lands exactly on the onset. note 2's vowel is 5
  // frames late.
  PhonemeAlignment ali;
  ali.segments = {{0, 5, "k"}, {5, 92, "a"}, {92, 100, "k"}, {100, 205, "a"}, {205, 300, "a"}};

  auto lags = compute_time_lag_targets(score, ali, refs);
  CHECK(lags.lag_frames[0] == 0.0);  // forced
  CHECK(lags.lag_frames[1] == 0.0);  // vowel is the reference, not the consonant
  CHECK(lags.lag_frames[2] == 5.0);
}

TEST_CASE("predict ops: degenerate weights and the MDN exponential link") {
  NetworkConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_widths = {3};
  cfg.output_dim = 1;
  Network net = Network::create(cfg);  // zero weights
  Matrix x(5, 4);
  for (auto& v : x.data) v = 1.0;
  auto lags = predict_time_lags(x, net);
  for (double g : lags.lag_frames) CHECK(g == 0.0);

  NetworkConfig mcfg;
  mcfg.input_dim = 4;
  mcfg.output_dim = 2;
  Network mdn = Network::create(mcfg);
  mdn.layers[0].b[1] = -3.0;  // logvar head bias
  auto dist = predict_durations(x, mdn);
  for (double v : dist.var) {
    CHECK(v == doctest::Approx(std::exp(-3.0)));
    CHECK(v > 0.0);
  }
}
