// cantus/kernels.h

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

#ifndef CANTUS_KERNELS_H_
#define CANTUS_KERNELS_H_

#include <cstddef>

// Data-parallel inner loops shared by the network, window-matrix, and
// metric code. Every operation has a scalar reference implementation and,
// on x86-64 machines that support it, an AVX2+FMA variant selected once at
// runtime. The environment variable CANTUS_KERNELS=scalar|avx2 overrides
// the automatic choice (the tests use it for equivalence checks).
//
// Elementwise kernels are bit-identical across backends. Reductions (dot,
// sum, sumsq, ...) may differ by reassociation rounding only.

namespace cantus {
namespace kernels {

struct Ops {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sumsq)(const double* x, std::size_t n);
  double (*sumsq_diff)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
  void (*add)(const double* x, const double* y, double* out, std::size_t n);
  void (*sub)(const double* x, const double* y, double* out, std::size_t n);
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
};

extern const Ops kScalarOps;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops kAvx2Ops;  // null-named when built without AVX2 support
#endif

// Active backend (selected on first use).
const Ops& ops();
const char* backend_name();

// Force a backend by name; throws ConfigError if unavailable on this
// machine/build. Intended for tests and the CLI --kernels flag.
void force_backend(const char* name);

// Convenience wrappers through the active backend.
inline double dot(const double* x, const double* y, std::size_t n) { return ops().dot(x, y, n); }
inline double sum(const double* x, std::size_t n) { return ops().sum(x, n); }
inline double sumsq(const double* x, std::size_t n) { return ops().sumsq(x, n); }
inline double sumsq_diff(const double* x, const double* y, std::size_t n) { return ops().sumsq_diff(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { ops().axpy(a, x, y, n); }
inline void scale(double a, double* x, std::size_t n) { ops().scale(a, x, n); }
inline void add(const double* x, const double* y, double* out, std::size_t n) { ops().add(x, y, out, n); }
inline void sub(const double* x, const double* y, double* out, std::size_t n) { ops().sub(x, y, out, n); }
inline void mul(const double* x, const double* y, double* out, std::size_t n) { ops().mul(x, y, out, n); }

// y = W x, W row-major rows x cols.
void matvec(const double* w, const double* x, double* y, std::size_t rows, std::size_t cols);
// out += W^T g (accumulates; used by backprop).
void matvec_t_acc(const double* w, const double* g, double* out, std::size_t rows, std::size_t cols);

}  // namespace kernels
}  // namespace cantus

#endif  // CANTUS_KERNELS_H_
