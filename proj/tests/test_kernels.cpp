// tests/test_kernels.cpp

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

// Equivalence tests between the scalar reference kernels and the AVX2
// variants: elementwise ops must match bit-exactly, reductions within
// reassociation rounding.

#include <cmath>
#include <vector>

#include "doctest.h"

#include "cantus/kernels.h"
#include "cantus/synth.h"

using namespace cantus;

namespace {

std::vector<double> random_vec(SynthRng& rng, std::size_t n, double scale = 10.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

bool avx2_available() {
#if defined(__x86_64__) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
         kernels::kAvx2Ops.name != nullptr;
#else
  return false;
#endif
}

}  // namespace

TEST_CASE("scalar reference kernels compute what they say") {
  std::vector<double> x = {1.0, 2.0, 3.0};
  std::vector<double> y = {4.0, -5.0, 6.0};
  const auto& ops = kernels::kScalarOps;
  CHECK(ops.dot(x.data(), y.data(), 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
  CHECK(ops.sum(x.data(), 3) == doctest::Approx(6.0));
  CHECK(ops.sumsq(x.data(), 3) == doctest::Approx(14.0));
  CHECK(ops.sumsq_diff(x.data(), y.data(), 3) == doctest::Approx(9.0 + 49.0 + 9.0));

  std::vector<double> out(3);
  ops.add(x.data(), y.data(), out.data(), 3);
  CHECK(out == std::vector<double>{5.0, -3.0, 9.0});
  ops.sub(x.data(), y.data(), out.data(), 3);
  CHECK(out == std::vector<double>{-3.0, 7.0, -3.0});
  ops.mul(x.data(), y.data(), out.data(), 3);
  CHECK(out == std::vector<double>{4.0, -10.0, 18.0});

  std::vector<double> acc = {1.0, 1.0, 1.0};
  ops.axpy(2.0, x.data(), acc.data(), 3);
  CHECK(acc == std::vector<double>{3.0, 5.0, 7.0});
  ops.scale(0.5, acc.data(), 3);
  CHECK(acc == std::vector<double>{1.5, 2.5, 3.5});
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("AVX2 unavailable; equivalence run skipped on this machine");
    return;
  }
  const auto& s = kernels::kScalarOps;
  const auto& v = kernels::kAvx2Ops;
  SynthRng rng(20260810);

  // lengths straddling the vector width and the unrolled tail
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 257u, 1000u}) {
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);

    CHECK(v.dot(x.data(), y.data(), n) ==
          doctest::Approx(s.dot(x.data(), y.data(), n)).epsilon(1e-13));
    CHECK(v.sum(x.data(), n) == doctest::Approx(s.sum(x.data(), n)).epsilon(1e-13));
    CHECK(v.sumsq(x.data(), n) == doctest::Approx(s.sumsq(x.data(), n)).epsilon(1e-13));
    CHECK(v.sumsq_diff(x.data(), y.data(), n) ==
          doctest::Approx(s.sumsq_diff(x.data(), y.data(), n)).epsilon(1e-13));

    // elementwise: bit-exact
    std::vector<double> a(n), b(n);
    s.add(x.data(), y.data(), a.data(), n);
    v.add(x.data(), y.data(), b.data(), n);
    CHECK(a == b);
    s.sub(x.data(), y.data(), a.data(), n);
    v.sub(x.data(), y.data(), b.data(), n);
    CHECK(a == b);
    s.mul(x.data(), y.data(), a.data(), n);
    v.mul(x.data(), y.data(), b.data(), n);
    CHECK(a == b);

    std::vector<double> sa = x, sb = x;
    s.scale(1.7, sa.data(), n);
    v.scale(1.7, sb.data(), n);
    CHECK(sa == sb);
  }
}

TEST_CASE("axpy avx2 matches scalar within fma rounding") {
  if (!avx2_available()) return;
  SynthRng rng(7);
  for (std::size_t n : {5u, 16u, 33u}) {
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);
    auto ys = y, yv = y;
    kernels::kScalarOps.axpy(-0.77, x.data(), ys.data(), n);
    kernels::kAvx2Ops.axpy(-0.77, x.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-15));
  }
}

TEST_CASE("matvec equals per-row dot products") {
  SynthRng rng(99);
  const std::size_t rows = 7, cols = 13;
  auto w = random_vec(rng, rows * cols);
  auto x = random_vec(rng, cols);
  std::vector<double> y(rows);
  kernels::matvec(w.data(), x.data(), y.data(), rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    CHECK(y[r] == doctest::Approx(kernels::dot(w.data() + r * cols, x.data(), cols)));
  }

  // transpose-accumulate agrees with the naive loop
  auto g = random_vec(rng, rows);
  std::vector<double> acc(cols, 0.0), ref(cols, 0.0);
  kernels::matvec_t_acc(w.data(), g.data(), acc.data(), rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) ref[c] += g[r] * w[r * cols + c];
  }
  for (std::size_t c = 0; c < cols; ++c) CHECK(acc[c] == doctest::Approx(ref[c]));
}

TEST_CASE("force_backend switches and rejects unknown names") {
  const char* original = kernels::backend_name();
  kernels::force_backend("scalar");
  CHECK(std::string(kernels::backend_name()) == "scalar");
  CHECK_THROWS_AS(kernels::force_backend("sse9"), ConfigError);
  kernels::force_backend(original);
}
