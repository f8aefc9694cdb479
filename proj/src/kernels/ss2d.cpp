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

#include "nnuzoo/kernels/ss2d.hpp"

#include "nnuzoo/kernels/linear.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::kernels {

Tensor selective_scan_tokens(const Tensor& seq, const ScanProjection& p) {
  const auto R = p.rank(), N = p.state();
  if (p.x_proj.rank() != 2 || p.x_proj.dim(1) != R + 2 * N)
    throw ShapeError("ss2d: x_proj must be E×(R+2N), got " + shape_str(p.x_proj.shape()));
  Tensor proj = linear(seq, p.x_proj);
  Tensor dt = ops::softplus(linear(ops::slice(proj, 2, 0, R), p.dt_proj, p.dt_bias));
  ScanParams sp;
  sp.delta = dt;
  sp.A = ops::neg(ops::exp(p.A_log));
  sp.B = ops::slice(proj, 2, R, R + N);
  sp.C = ops::slice(proj, 2, R + N, R + 2 * N);
  sp.D = p.D;
  return selective_scan(seq, sp);
}

Tensor ss2d_direction(const Tensor& x, const ScanProjection& p, Traversal order) {
  Tensor y = selective_scan_tokens(to_sequence(x, order), p);
  return from_sequence(y, order, x.dim(2), x.dim(3));
}

Tensor ss2d(const Tensor& x, const std::array<ScanProjection, 4>& dirs) {
  Tensor merged;
  for (std::size_t i = 0; i < kAllTraversals.size(); ++i) {
    Tensor y = ss2d_direction(x, dirs[i], kAllTraversals[i]);
    merged = merged.defined() ? ops::add(merged, y) : y;
  }
  return merged;
}

}  // namespace nnuzoo::kernels
