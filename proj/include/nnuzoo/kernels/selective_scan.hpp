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

/// Inputs of one selective scan. Shapes use Bt = batch, L = sequence length,
/// E = inner width, N = state size.
struct ScanParams {
  Tensor delta;  // Bt×L×E, strictly positive
  Tensor A;      // E×N, the (negative) continuous state matrix diagonal
  Tensor B;      // Bt×L×N
  Tensor C;      // Bt×L×N
  Tensor D;      // E, optional skip gain
};

/// Discretized diagonal state-space recurrence, h_0 = 0:
///   h_t = exp(Δ_t ⊗ A) ⊙ h_{t-1} + (Δ_t ⊗ B_t) x_t
///   y_t = <C_t, h_t> + D ⊙ x_t
/// x is Bt×L×E. Differentiable in every input.
Tensor selective_scan(const Tensor& x, const ScanParams& p);

}  // namespace nnuzoo::kernels
