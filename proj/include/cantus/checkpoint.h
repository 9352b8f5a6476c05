// cantus/checkpoint.h

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

#ifndef CANTUS_CHECKPOINT_H_
#define CANTUS_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "cantus/network.h"
#include "cantus/train.h"

namespace cantus {

// Self-describing JSON checkpoints. Every file carries a format tag, a
// version, the model kind, and the hash of the feature schema it was
// trained with; loading refuses on kind or schema-hash mismatch.

void save_network_checkpoint(const std::string& path, const std::string& kind,
                             const Network& net, std::uint64_t schema_hash);
Network load_network_checkpoint(const std::string& path, const std::string& kind,
                                std::uint64_t schema_hash);

void save_acoustic_checkpoint(const std::string& path, const AcousticModel& model,
                              std::uint64_t schema_hash);
AcousticModel load_acoustic_checkpoint(const std::string& path,
                                       std::uint64_t schema_hash);

// Writes via a temp file in the same directory plus rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace cantus

#endif  // CANTUS_CHECKPOINT_H_
