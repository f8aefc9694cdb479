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

#include <optional>
#include <string>
#include <vector>

namespace nnuzoo {

enum class ArchitectureId {
  nnUNetLike,
  UNETR,
  SwT,
  SwinUMamba,
  SegMamba,
  LightUMamba,
  U2Net,
  U2NetS,
  UNETR2Net,
  SwT2Net,
  SS2D2Net,
  SS2D2NetS,
  Alt1DM2Net,
  Alt1DM2NetS,
  MambaND2Net,
};

/// Canonical display name, e.g. "SS2D2Net", "nnUNet-like".
std::string arch_name(ArchitectureId arch);
/// Case-insensitive; also accepts "nnUNet". Throws ValueError for unknown names.
ArchitectureId arch_from_name(const std::string& name);
/// All 15 architectures in table order.
const std::vector<ArchitectureId>& all_architectures();

/// True for the eleven-stage nested U-Net family (U2Net, U2NetS and the X²Net variants).
bool is_nested(ArchitectureId arch);
/// True for the compact variants built on the small channel plan.
bool is_small(ArchitectureId arch);

/// Dataset presets: Microscopy, CAMUS, ACDC, AbdomenMR, AbdomenCT, PET, SynthShapes.
const std::vector<std::string>& preset_names();

/// Target parameter count in millions for an architecture at a dataset
/// preset. None for SynthShapes, which has no target.
std::optional<double> target_params_millions(ArchitectureId arch, const std::string& preset);

}  // namespace nnuzoo
