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

#include "nnuzoo/blocks/module.hpp"
#include "nnuzoo/kernels/conv_blocks.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo {

class Conv2d : public Module {
 public:
  Conv2d(ParamInit& init, std::int64_t in, std::int64_t out, int kernel, ops::Conv2dOptions opt = {},
         bool bias = true);
  /// Same-padded k×k convolution with dilation.
  static std::unique_ptr<Conv2d> same(ParamInit& init, std::int64_t in, std::int64_t out, int kernel,
                                      int dilation = 1, bool bias = true);
  Tensor forward(const Tensor& x) override;

  Tensor weight, bias;
  ops::Conv2dOptions opt;
};

class ConvTranspose2d : public Module {
 public:
  ConvTranspose2d(ParamInit& init, std::int64_t in, std::int64_t out, int kernel, int stride, bool bias = true);
  Tensor forward(const Tensor& x) override;

  Tensor weight, bias;
  int stride;
};

/// y = x·W + b over the last axis.
class Linear : public Module {
 public:
  Linear(ParamInit& init, std::int64_t in, std::int64_t out, bool bias = true);
  Tensor forward(const Tensor& x) override;

  Tensor weight, bias;
};

/// Layer norm with affine parameters over the last axis (channels_last) or
/// over axis 1 of B×C×H×W (channels_first).
class LayerNorm : public Module {
 public:
  enum class Layout { channels_last, channels_first };
  LayerNorm(ParamInit& init, std::int64_t dim, Layout layout = Layout::channels_last);
  Tensor forward(const Tensor& x) override;

  Tensor gamma, beta;
  Layout layout;
};

/// Per-sample, per-channel normalization over H×W with affine parameters.
class InstanceNorm2d : public Module {
 public:
  InstanceNorm2d(ParamInit& init, std::int64_t channels);
  Tensor forward(const Tensor& x) override;

  Tensor gamma, beta;
};

/// conv3×3 (dilated, same padding) → instance norm → leaky ReLU(0.01).
class ConvNormAct : public Module {
 public:
  ConvNormAct(ParamInit& init, std::int64_t in, std::int64_t out, int dilation = 1, int kernel = 3);
  Tensor forward(const Tensor& x) override;

 private:
  Conv2d* conv_;
  InstanceNorm2d* norm_;
};

class DepthwiseSeparableConv : public Module {
 public:
  /// identity_init places delta depthwise kernels and (when in == out) an
  /// identity pointwise matrix, so the layer starts as a pass-through.
  DepthwiseSeparableConv(ParamInit& init, std::int64_t in, std::int64_t out, int kernel = 3, bool bias = false,
                         bool identity_init = false);
  Tensor forward(const Tensor& x) override;

  Tensor dw_weight, pw_weight, dw_bias, pw_bias;
};

class GatedSpatialConv : public Module {
 public:
  GatedSpatialConv(ParamInit& init, std::int64_t channels);
  Tensor forward(const Tensor& x) override;

  kernels::GatedSpatialWeights w;
};

/// y_block + depthwise_separable_conv(x_in).
class ResidualAdapter : public Module {
 public:
  ResidualAdapter(ParamInit& init, std::int64_t in, std::int64_t out);
  Tensor forward(const Tensor& x_in, const Tensor& y_block);
  DepthwiseSeparableConv& conv() { return *conv_; }

 private:
  DepthwiseSeparableConv* conv_;
};

/// Two-layer channels-last MLP with GELU.
class Mlp : public Module {
 public:
  Mlp(ParamInit& init, std::int64_t dim, std::int64_t hidden);
  Tensor forward(const Tensor& x) override;

 private:
  Linear* fc1_;
  Linear* fc2_;
};

}  // namespace nnuzoo
