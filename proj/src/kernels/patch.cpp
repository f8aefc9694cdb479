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

#include "nnuzoo/kernels/patch.hpp"

#include "nnuzoo/kernels/linear.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::kernels {

namespace {

Tensor project(const Tensor& x, const PatchProjection& p) {
  return ops::conv2d(x, p.weight, p.bias.defined() ? std::optional<Tensor>(p.bias) : std::nullopt, 1, 0);
}

}  // namespace

Tensor patch_merge(const Tensor& x, int scale, const PatchProjection& p) {
  if (x.rank() != 4) throw ShapeError("patch_merge: expects B×C×H×W, got " + shape_str(x.shape()));
  if (scale < 1 || x.dim(2) % scale != 0 || x.dim(3) % scale != 0)
    throw ShapeError("patch_merge: " + shape_str(x.shape()) + " not divisible by scale " + std::to_string(scale));
  Tensor t = ops::space_to_depth(x, scale);
  if (p.normalize) t = layer_norm_channels(t, p.norm_gamma, p.norm_beta);
  return project(t, p);
}

Tensor patch_expand(const Tensor& x, int scale, const PatchProjection& p) {
  if (x.rank() != 4) throw ShapeError("patch_expand: expects B×C×H×W, got " + shape_str(x.shape()));
  if (scale < 1) throw ValueError("patch_expand: scale must be >= 1");
  if (p.weight.dim(0) % (scale * scale) != 0)
    throw ShapeError("patch_expand: projection width " + std::to_string(p.weight.dim(0)) + " not divisible by " +
                     std::to_string(scale * scale));
  Tensor t = ops::depth_to_space(project(x, p), scale);
  if (p.normalize) t = layer_norm_channels(t, p.norm_gamma, p.norm_beta);
  return t;
}

}  // namespace nnuzoo::kernels
