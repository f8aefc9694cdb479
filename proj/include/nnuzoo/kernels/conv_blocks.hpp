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

/// Per-channel k×k conv (same padding) followed by a 1×1 conv.
/// dw_weight C×1×k×k, pw_weight C'×C×1×1; biases optional.
Tensor depthwise_separable_conv(const Tensor& x, const Tensor& dw_weight, const Tensor& pw_weight,
                                const Tensor& dw_bias = Tensor(), const Tensor& pw_bias = Tensor());

struct GatedSpatialWeights {
  Tensor feat_w;  // C×C×3×3
  Tensor feat_b;  // C
  Tensor gate_w;  // C×C×1×1
  Tensor gate_b;  // C
};

/// conv3×3(x) ⊙ sigmoid(conv1×1(x)) + x.
Tensor gated_spatial_conv(const Tensor& x, const GatedSpatialWeights& w);

}  // namespace nnuzoo::kernels
