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

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::kernels {

/// Projections of a multi-head self-attention layer. Weights are in×out.
struct AttentionWeights {
  Tensor q_w, k_w, v_w;  // C×C
  Tensor q_b, k_b, v_b;  // C, optional
  Tensor out_w;          // C×C
  Tensor out_b;          // C, optional
};

/// Softmax attention probabilities, B×heads×L×L. `logit_bias` (optional)
/// broadcasts against that shape and is added before the softmax.
Tensor attention_probs(const Tensor& x, const AttentionWeights& w, int heads, const Tensor& logit_bias = Tensor());

/// Scaled dot-product multi-head self-attention over x: B×L×C.
Tensor mhsa(const Tensor& x, const AttentionWeights& w, int heads, const Tensor& logit_bias = Tensor());

/// Same as mhsa but stops before the output projection (B×L×C).
Tensor mhsa_values(const Tensor& x, const AttentionWeights& w, int heads, const Tensor& logit_bias = Tensor());

/// Table rows needed by a relative-position bias for window w: (2w-1)².
std::int64_t relative_bias_rows(int window);

/// Windowed attention on x: B×H×W×C. H and W are zero-padded up to
/// multiples of `window`; a nonzero `shift` rolls the map by -shift before
/// partitioning and masks pairs that wrapped around. `bias_table` is
/// (2w-1)²×heads (optional).
Tensor window_attention(const Tensor& x, const AttentionWeights& w, int window, int shift, int heads,
                        const Tensor& bias_table = Tensor());

/// Cyclic roll of a B×H×W×C map by (dy, dx) along H and W.
Tensor roll2d(const Tensor& x, std::int64_t dy, std::int64_t dx);

}  // namespace nnuzoo::kernels
