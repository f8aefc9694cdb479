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

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::kernels {

/// Channel projection used by patch merging/expansion. `weight` is a 1×1
/// conv kernel Cout×Cin×1×1; norm parameters are optional.
struct PatchProjection {
  Tensor weight;
  Tensor bias;        // Cout
  Tensor norm_gamma;  // channels normalized (see below)
  Tensor norm_beta;
  bool normalize = false;
};

/// Space-to-depth (C → C·s²), channel layer norm over the C·s² features
/// when enabled, then projection to Cout. B×C×H×W → B×Cout×H/s×W/s.
Tensor patch_merge(const Tensor& x, int scale, const PatchProjection& p);

/// Projection to Cout·s², depth-to-space, then channel layer norm over the
/// Cout features when enabled. B×C×H×W → B×Cout×H·s×W·s.
Tensor patch_expand(const Tensor& x, int scale, const PatchProjection& p);

}  // namespace nnuzoo::kernels
