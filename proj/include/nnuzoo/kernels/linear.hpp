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

/// x·W (+ b) over the last axis. W is in×out; b (optional) has shape [out].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias = Tensor());

/// Layer norm over the last axis with optional per-feature affine.
Tensor layer_norm_last(const Tensor& x, const Tensor& gamma = Tensor(), const Tensor& beta = Tensor(),
                       double eps = 1e-5);

/// Layer norm over the channel axis of B×C×H×W with optional affine.
Tensor layer_norm_channels(const Tensor& x, const Tensor& gamma = Tensor(), const Tensor& beta = Tensor(),
                           double eps = 1e-5);

}  // namespace nnuzoo::kernels
