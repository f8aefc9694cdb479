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

#include "nnuzoo/kernels/conv_blocks.hpp"

#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::kernels {

namespace {

std::optional<Tensor> opt(const Tensor& t) { return t.defined() ? std::optional<Tensor>(t) : std::nullopt; }

}  // namespace

Tensor depthwise_separable_conv(const Tensor& x, const Tensor& dw_weight, const Tensor& pw_weight,
                                const Tensor& dw_bias, const Tensor& pw_bias) {
  if (x.rank() != 4) throw ShapeError("depthwise_separable_conv: expects B×C×H×W, got " + shape_str(x.shape()));
  const auto C = x.dim(1);
  if (dw_weight.rank() != 4 || dw_weight.dim(0) != C || dw_weight.dim(1) != 1)
    throw ShapeError("depthwise_separable_conv: depthwise weight must be " + std::to_string(C) + "×1×k×k, got " +
                     shape_str(dw_weight.shape()));
  if (pw_weight.rank() != 4 || pw_weight.dim(1) != C || pw_weight.dim(2) != 1 || pw_weight.dim(3) != 1)
    throw ShapeError("depthwise_separable_conv: pointwise weight must be C'×" + std::to_string(C) + "×1×1, got " +
                     shape_str(pw_weight.shape()));
  const auto k = dw_weight.dim(2);
  if (k % 2 == 0 || dw_weight.dim(3) != k) throw ShapeError("depthwise_separable_conv: kernel must be odd and square");
  Tensor h = ops::conv2d(x, dw_weight, opt(dw_bias), 1, static_cast<int>(k / 2), 1, static_cast<int>(C));
  return ops::conv2d(h, pw_weight, opt(pw_bias), 1, 0);
}

Tensor gated_spatial_conv(const Tensor& x, const GatedSpatialWeights& w) {
  Tensor feat = ops::conv2d(x, w.feat_w, opt(w.feat_b), 1, 1);
  Tensor gate = ops::sigmoid(ops::conv2d(x, w.gate_w, opt(w.gate_b), 1, 0));
  return ops::add(ops::mul(feat, gate), x);
}

}  // namespace nnuzoo::kernels
