// tests/test_window_mlpg.cpp

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
#include <vector>

#include "doctest.h"

#include "cantus/synth.h"
#include "cantus/window.h"
#include "oracles.h"

using namespace cantus;

TEST_CASE("constant sequence has zero velocity and acceleration") {
  const int T = 6;
  WindowOp op(T, WindowSet::standard());
  std::vector<double> c(T, 3.25), o(T * 3);
  op.apply(c.data(), o.data());
  for (int t = 0; t < T; ++t) {
    CHECK(o[t * 3 + 0] == doctest::Approx(3.25));
    CHECK(o[t * 3 + 1] == doctest::Approx(0.0));
    CHECK(o[t * 3 + 2] == doctest::Approx(0.0));
  }
}

TEST_CASE("ramp 0,1,2,3 has unit velocity at interior frames") {
  const int T = 4;
  WindowOp op(T, WindowSet::standard());
  std::vector<double> c = {0.0, 1.0, 2.0, 3.0}, o(T * 3);
  op.apply(c.data(), o.data());
  CHECK(o[1 * 3 + 1] == doctest::Approx(1.0));
  CHECK(o[2 * 3 + 1] == doctest::Approx(1.0));
  // edge replication halves the one-sided slope
  CHECK(o[0 * 3 + 1] == doctest::Approx(0.5));
  CHECK(o[3 * 3 + 1] == doctest::Approx(0.5));
  // interior acceleration of a straight line is zero
  CHECK(o[1 * 3 + 2] == doctest::Approx(0.0));
  CHECK(o[2 * 3 + 2] == doctest::Approx(0.0));
}

TEST_CASE("static-only window set is the identity operator") {
  const int T = 5;
  WindowOp op(T, WindowSet::static_only());
  std::vector<double> c = {1, -2, 3, -4, 5}, o(T);
  op.apply(c.data(), o.data());
  for (int t = 0; t < T; ++t) CHECK(o[t] == c[t]);

  Matrix means(T, 1);
  for (int t = 0; t < T; ++t) means.at(t, 0) = c[t];
  Matrix out = mlpg(means, {2.0}, op);
  for (int t = 0; t < T; ++t) CHECK(out.at(t, 0) == doctest::Approx(c[t]));
}

TEST_CASE("apply_transpose is the adjoint of apply") {
  SynthRng rng(5);
  const int T = 17;
  WindowOp op(T, WindowSet::standard());
  std::vector<double> c(T), o(T * 3), g(T * 3), gc(T, 0.0);
  for (auto& v : c) v = rng.normal(1.0);
  for (auto& v : g) v = rng.normal(1.0);
  op.apply(c.data(), o.data());
  op.apply_transpose_acc(g.data(), gc.data());
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < T * 3; ++i) lhs += o[i] * g[i];
  for (int t = 0; t < T; ++t) rhs += c[t] * gc[t];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("T=3 toy mlpg matches the dense least-squares oracle") {
  const int T = 3;
  WindowSet ws = WindowSet::standard();
  WindowOp op(T, ws);
  Matrix means(T, 3);
  // one dimension: statics {1, 2, 4}, velocities {0.5, 1, 1}, accels {0,0,0}
  double vals[3][3] = {{1, 0.5, 0}, {2, 1.0, 0}, {4, 1.0, 0}};
  for (int t = 0; t < T; ++t) {
    for (int w = 0; w < 3; ++w) means.at(t, w) = vals[t][w];
  }
  std::vector<double> gv = {1.0, 0.5, 2.0};
  Matrix got = mlpg(means, gv, op);

  std::vector<double> o(T * 3), inv_var = {1.0, 2.0, 0.5};
  for (int t = 0; t < T; ++t) {
    for (int w = 0; w < 3; ++w) o[t * 3 + w] = vals[t][w];
  }
  auto expect = cantus_test::mlpg_dense_oracle(T, ws, o, inv_var);
  for (int t = 0; t < T; ++t) {
    CHECK(got.at(t, 0) == doctest::Approx(expect[t]).epsilon(1e-9));
  }
}

TEST_CASE("constant statics with zero deltas stay constant through mlpg") {
  const int T = 20;
  WindowOp op(T, WindowSet::standard());
  Matrix means(T, 3);
  for (int t = 0; t < T; ++t) means.at(t, 0) = 7.5;
  Matrix out = mlpg(means, {1.0, 1.0, 1.0}, op);
  for (int t = 0; t < T; ++t) CHECK(out.at(t, 0) == doctest::Approx(7.5).epsilon(1e-10));
}

TEST_CASE("banded solve matches dense least squares on random sequences") {
  SynthRng rng(42);
  WindowSet ws = WindowSet::standard();
  for (int trial = 0; trial < 50; ++trial) {
    int T = 2 + static_cast<int>(rng.uniform() * 62);  // up to 64
    WindowOp op(T, ws);
    std::vector<double> gv(3), inv_var(3);
    for (int w = 0; w < 3; ++w) {
      gv[w] = 0.1 + 3.0 * rng.uniform();
      inv_var[w] = 1.0 / gv[w];
    }
    Matrix means(T, 3);
    std::vector<double> o(static_cast<std::size_t>(T) * 3);
    for (int t = 0; t < T; ++t) {
      for (int w = 0; w < 3; ++w) {
        double v = rng.normal(2.0);
        means.at(t, w) = v;
        o[static_cast<std::size_t>(t) * 3 + w] = v;
      }
    }
    Matrix got = mlpg(means, gv, op);
    auto expect = cantus_test::mlpg_dense_oracle(T, ws, o, inv_var);
    double scale = 0.0;
    for (int t = 0; t < T; ++t) scale = std::max(scale, std::abs(expect[t]));
    for (int t = 0; t < T; ++t) {
      CHECK(std::abs(got.at(t, 0) - expect[t]) <= 1e-9 * std::max(1.0, scale));
    }

    // gradient of the likelihood objective at the solution is ~0:
    // grad = W^T Sigma^-1 (W c - o)
    std::vector<double> c(T), wc(static_cast<std::size_t>(T) * 3), grad(T, 0.0);
    for (int t = 0; t < T; ++t) c[t] = got.at(t, 0);
    op.apply(c.data(), wc.data());
    std::vector<double> resid(wc.size());
    for (int t = 0; t < T; ++t) {
      for (int w = 0; w < 3; ++w) {
        std::size_t i = static_cast<std::size_t>(t) * 3 + w;
        resid[i] = (wc[i] - o[i]) * inv_var[w];
      }
    }
    op.apply_transpose_acc(resid.data(), grad.data());
    std::vector<double> rhs(T);
    op.weighted_transpose_apply(o.data(), inv_var.data(), rhs.data());
    double rhs_scale = 1.0;
    for (int t = 0; t < T; ++t) rhs_scale = std::max(rhs_scale, std::abs(rhs[t]));
    for (int t = 0; t < T; ++t) CHECK(std::abs(grad[t]) < 1e-8 * rhs_scale);
  }
}

TEST_CASE("mlpg requires the identity static window and positive variance") {
  WindowSet no_static;
  no_static.windows.push_back({{-0.5, 0.0, 0.5}, -1});
  WindowOp op(4, no_static);
  Matrix means(4, 1);
  CHECK_THROWS_AS(mlpg(means, {1.0}, op), NumericError);

  WindowOp ok(4, WindowSet::static_only());
  CHECK_THROWS_AS(mlpg(means, {0.0}, ok), NumericError);
}

TEST_CASE("banded cholesky rejects non-SPD systems") {
  BandedSpd a(2, 1);
  a.at(0, 0) = 1.0;
  a.at(1, 0) = 5.0;  // makes the Schur complement negative
  a.at(1, 1) = 1.0;
  CHECK_THROWS_AS(a.cholesky_inplace(), NumericError);
}

TEST_CASE("multi-dimension mlpg treats dimensions independently") {
  SynthRng rng(11);
  const int T = 12;
  WindowOp op(T, WindowSet::standard());
  Matrix means(T, 6);  // two dims, window-major blocks
  std::vector<double> gv(6);
  for (auto& v : gv) v = 0.2 + rng.uniform();
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < 6; ++i) means.at(t, i) = rng.normal(1.0);
  }
  Matrix both = mlpg(means, gv, op);

  for (int d = 0; d < 2; ++d) {
    Matrix single(T, 3);
    std::vector<double> gv1(3);
    for (int w = 0; w < 3; ++w) {
      gv1[w] = gv[w * 2 + d];
      for (int t = 0; t < T; ++t) single.at(t, w) = means.at(t, w * 2 + d);
    }
    Matrix one = mlpg(single, gv1, op);
    for (int t = 0; t < T; ++t) {
      CHECK(both.at(t, d) == doctest::Approx(one.at(t, 0)).epsilon(1e-12));
    }
  }
}
