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
#include <string>
#include <vector>

#include "nnuzoo/blocks/ublock.hpp"
#include "nnuzoo/models/arch.hpp"

namespace nnuzoo {

/// Everything needed to rebuild a model bit-for-bit.
///
/// Nested architectures carry their eleven stage specs (En1..En6, De5..De1)
/// in `stages`. The other architectures read their hyperparameters from
/// `attrs`.
struct ModelConfig {
  ArchitectureId arch = ArchitectureId::U2NetS;
  std::string preset;
  std::int64_t in_channels = 1;
  std::int64_t num_classes = 2;
  std::int64_t height = 64, width = 64;
  std::int64_t batch_size = 8;
  double width_mult = 1.0;
  std::uint64_t seed = 0;
  Attrs attrs;
  std::vector<UBlockSpec> stages;

  /// Divisor that height and width must share.
  std::int64_t downsample_factor() const;
  /// Throws ValueError (bad counts) or ShapeError (indivisible geometry).
  void validate() const;
};

/// Compact JSON with sorted keys; equal configs give equal strings.
std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& json);

/// Geometry of a dataset preset plus the calibrated defaults of `arch`.
/// `width_mult` scales every channel width (1.0 = calibrated size).
ModelConfig preset_config(ArchitectureId arch, const std::string& preset, double width_mult = 1.0);

inline constexpr double kTinyWidth = 0.5;
/// SynthShapes geometry at width kTinyWidth: the desk-scale training size.
ModelConfig tiny_config(ArchitectureId arch);

/// Re-derives `stages` of a nested architecture from the other fields.
void rebuild_stage_plan(ModelConfig& cfg);

}  // namespace nnuzoo
