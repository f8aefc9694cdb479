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

#include "nnuzoo/models/arch.hpp"
#include "nnuzoo/tensor/primitive.hpp"

namespace nnuzoo::presets {

/// Calibrated hyperparameters of `arch` at a preset. Nested architectures get
/// block attrs plus plan_scale (and embed_ratio for UNETR stages); the other
/// architectures get their full topology description.
Attrs calibrated_attrs(ArchitectureId arch, const std::string& preset, std::int64_t height, std::int64_t width);

/// Multiplies the channel widths of a non-nested architecture in place.
void scale_baseline_attrs(ArchitectureId arch, Attrs& attrs, double width_mult);

std::int64_t baseline_downsample_factor(ArchitectureId arch, const Attrs& attrs);

}  // namespace nnuzoo::presets
