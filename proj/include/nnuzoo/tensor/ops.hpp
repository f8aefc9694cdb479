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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

// Differentiable primitive catalog. Every function records its adjoint on the
// active tape when at least one input is tracked.
namespace nnuzoo::ops {

// Elementwise binary ops with numpy broadcasting.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& x, double value);
Tensor mul_scalar(const Tensor& x, double value);

Tensor neg(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
/// Exact erf form.
Tensor gelu(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor softplus(const Tensor& x);

/// Batched matrix product over the last two axes; batch axes broadcast.
/// A rank-2 `b` is shared across all batches of `a`.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sum(const Tensor& x, std::vector<int> axes = {}, bool keepdim = false);
Tensor mean(const Tensor& x, std::vector<int> axes = {}, bool keepdim = false);

Tensor softmax(const Tensor& x, int axis);
Tensor log_softmax(const Tensor& x, int axis);

Tensor concat(std::span<const Tensor> xs, int axis);
Tensor concat(std::initializer_list<Tensor> xs, int axis);
/// Half-open [start, stop) along one axis.
Tensor slice(const Tensor& x, int axis, std::int64_t start, std::int64_t stop);
/// A single -1 entry is inferred.
Tensor reshape(const Tensor& x, Shape shape);
Tensor permute(const Tensor& x, std::vector<int> order);
/// `pads[i]` = (before, after) for axis i; missing trailing axes are unpadded.
Tensor pad(const Tensor& x, const std::vector<std::pair<std::int64_t, std::int64_t>>& pads,
           double value = 0.0);
/// Gathers entries along `axis`; indices may repeat.
Tensor index_select(const Tensor& x, int axis, const std::vector<std::int64_t>& indices);

enum class UpsampleMode { nearest, bilinear };
/// Integer-factor upsampling of the last two axes (bilinear uses half-pixel centers).
Tensor upsample2d(const Tensor& x, int scale, UpsampleMode mode);
Tensor max_pool2d(const Tensor& x, int kernel, int stride);

/// Normalizes over `axes` without affine parameters.
Tensor layer_norm(const Tensor& x, std::vector<int> axes, double eps = 1e-5);
/// Per-(batch, channel) normalization of a B×C×H×W tensor over H×W.
Tensor instance_norm(const Tensor& x, double eps = 1e-5);
Tensor dropout(const Tensor& x, double p, bool train, std::uint64_t seed);

struct Conv2dOptions {
  int stride = 1;
  int padding = 0;
  int dilation = 1;
  int groups = 1;
};

/// Cross-correlation. input B×C×H×W, weight O×(C/groups)×kh×kw.
Tensor conv2d(const Tensor& input, const Tensor& weight, const std::optional<Tensor>& bias,
              Conv2dOptions opt = {});
Tensor conv2d(const Tensor& input, const Tensor& weight, const std::optional<Tensor>& bias,
              int stride, int padding, int dilation = 1, int groups = 1);

/// Adjoint of conv2d w.r.t. its input. weight Cin×Cout×kh×kw.
Tensor conv_transpose2d(const Tensor& input, const Tensor& weight,
                        const std::optional<Tensor>& bias, int stride, int padding);

/// Rearranges each s×s cell into channels: B×C×H×W → B×(C·s²)×H/s×W/s.
Tensor space_to_depth(const Tensor& x, int scale);
/// Inverse of space_to_depth.
Tensor depth_to_space(const Tensor& x, int scale);

/// Reduces `g` to `shape` by summing broadcast axes. Not recorded.
Tensor sum_to(const Tensor& g, const Shape& shape);

}  // namespace nnuzoo::ops
