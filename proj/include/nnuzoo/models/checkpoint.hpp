// Copyright 2026 The nnUZoo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nnuzoo/models/model.hpp"

namespace nnuzoo {

/// Binary layout, little-endian:
///   "NNUZCKPT" | u32 version | u32 len + architecture name | u32 len + config JSON |
///   u32 leaf count | per leaf: u32 len + name, u8 dtype, u8 rank, u32 dims[rank], raw data
struct Checkpoint {
  std::string arch;
  ModelConfig config;
  std::vector<NamedTensor> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Model& model);
Checkpoint parse_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::string& path, const Model& model);
Checkpoint read_checkpoint(const std::string& path);

/// Copies checkpoint tensors into a model with the same parameter names and shapes.
void load_weights(Model& model, const Checkpoint& ckpt);
/// Builds the model described by the checkpoint and loads its weights.
std::unique_ptr<Model> load_model(const std::string& path);

}  // namespace nnuzoo
