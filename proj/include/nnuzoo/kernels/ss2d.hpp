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

#include <array>

#include "nnuzoo/kernels/selective_scan.hpp"
#include "nnuzoo/kernels/traversal.hpp"

namespace nnuzoo::kernels {

/// Learned per-direction parameters that turn a token sequence into
/// selective-scan inputs. E = inner width, R = Δ rank, N = state size.
struct ScanProjection {
  Tensor x_proj;   // E×(R+2N): token → [Δ-low-rank, B, C]
  Tensor dt_proj;  // R×E
  Tensor dt_bias;  // E
  Tensor A_log;    // E×N, A = -exp(A_log)
  Tensor D;        // E

  std::int64_t rank() const { return dt_proj.dim(0); }
  std::int64_t state() const { return A_log.dim(1); }
};

/// Data-dependent scan of a B×L×E sequence: Δ = softplus(dt_proj(x_proj(x)_R) + dt_bias),
/// B and C read from the remaining projected columns.
Tensor selective_scan_tokens(const Tensor& seq, const ScanProjection& p);

/// One direction of ss2d: reorder, scan, restore the grid. x is B×E×H×W.
Tensor ss2d_direction(const Tensor& x, const ScanProjection& p, Traversal order);

/// Four-direction scan of a B×E×H×W map merged by summation (output
/// projection is applied by the caller). `dirs` follows kAllTraversals.
Tensor ss2d(const Tensor& x, const std::array<ScanProjection, 4>& dirs);

}  // namespace nnuzoo::kernels
