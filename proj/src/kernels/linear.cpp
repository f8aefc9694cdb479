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

#include "nnuzoo/kernels/linear.hpp"

#include "nnuzoo/error.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::kernels {

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2) throw ShapeError("linear: weight must be in×out, got " + shape_str(weight.shape()));
  if (x.shape().back() != weight.dim(0))
    throw ShapeError("linear: input " + shape_str(x.shape()) + " vs weight " + shape_str(weight.shape()));
  Tensor y = ops::matmul(x, weight);
  return bias.defined() ? ops::add(y, bias) : y;
}

Tensor layer_norm_last(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  Tensor y = ops::layer_norm(x, {-1}, eps);
  if (gamma.defined()) y = ops::mul(y, gamma);
  if (beta.defined()) y = ops::add(y, beta);
  return y;
}

Tensor layer_norm_channels(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (x.rank() != 4) throw ShapeError("layer_norm_channels: expects B×C×H×W, got " + shape_str(x.shape()));
  Tensor y = ops::layer_norm(x, {1}, eps);
  const Shape cs{1, x.dim(1), 1, 1};
  if (gamma.defined()) y = ops::mul(y, ops::reshape(gamma, cs));
  if (beta.defined()) y = ops::add(y, ops::reshape(beta, cs));
  return y;
}

}  // namespace nnuzoo::kernels
