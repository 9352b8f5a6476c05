// kernels/kernels_dispatch.cpp

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

#include "cantus/kernels.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "cantus/common.h"

namespace cantus {
namespace kernels {

namespace {

const Ops* avx2_ops_or_null() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  if (kAvx2Ops.name != nullptr && __builtin_cpu_supports("avx2") &&
      __builtin_cpu_supports("fma")) {
    return &kAvx2Ops;
  }
#endif
  return nullptr;
}

const Ops* pick_default() {
  if (const char* env = std::getenv("CANTUS_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalarOps;
    if (std::strcmp(env, "avx2") == 0) {
      if (const Ops* avx2 = avx2_ops_or_null()) return avx2;
      throw ConfigError("CANTUS_KERNELS=avx2 but AVX2 is unavailable");
    }
    throw ConfigError(std::string("unknown CANTUS_KERNELS backend: ") + env);
  }
  if (const Ops* avx2 = avx2_ops_or_null()) return avx2;
  return &kScalarOps;
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& ops() {
  const Ops* p = g_active.load(std::memory_order_acquire);
  if (!p) {
    p = pick_default();
    g_active.store(p, std::memory_order_release);
  }
  return *p;
}

const char* backend_name() { return ops().name; }

void force_backend(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    g_active.store(&kScalarOps, std::memory_order_release);
    return;
  }
  if (std::strcmp(name, "avx2") == 0) {
    const Ops* avx2 = avx2_ops_or_null();
    if (!avx2) throw ConfigError("AVX2 backend unavailable on this machine");
    g_active.store(avx2, std::memory_order_release);
    return;
  }
  throw ConfigError(std::string("unknown kernel backend: ") + name);
}

void matvec(const double* w, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  const Ops& o = ops();
  for (std::size_t r = 0; r < rows; ++r) y[r] = o.dot(w + r * cols, x, cols);
}

void matvec_t_acc(const double* w, const double* g, double* out,
                  std::size_t rows, std::size_t cols) {
  const Ops& o = ops();
  for (std::size_t r = 0; r < rows; ++r) o.axpy(g[r], w + r * cols, out, cols);
}

}  // namespace kernels
}  // namespace cantus
