// cantus/common.h

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

#ifndef CANTUS_COMMON_H_
#define CANTUS_COMMON_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cantus {

// Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
// NumericError -> 4.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Row-major dense matrix of doubles. Deliberately minimal; heavy lifting
// goes through cantus::kernels.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Frame span of one note event, with rests kept in sequence. Used wherever
// per-note structure must survive away from the full Score (training
// records, bias expansion, weight vectors).
struct NoteSpan {
  int start_frame = 0;
  int end_frame = 0;  // half-open
  bool is_rest = false;
  int length() const { return end_frame - start_frame; }
};

// FNV-1a, used for schema hashes embedded in checkpoints.
inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// A4 = 440 Hz is the 0-cent origin; MIDI note m sits at (m - 69) * 100 cents.
inline double midi_to_cents(int midi) { return (midi - 69) * 100.0; }
inline double hz_to_cents(double hz) { return 1200.0 * std::log2(hz / 440.0); }
inline double cents_to_hz(double cents) { return 440.0 * std::pow(2.0, cents / 1200.0); }

}  // namespace cantus

#endif  // CANTUS_COMMON_H_
