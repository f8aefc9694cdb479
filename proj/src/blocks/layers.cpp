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

#include "nnuzoo/blocks/layers.hpp"

#include "nnuzoo/kernels/linear.hpp"

namespace nnuzoo {

namespace {

std::optional<Tensor> maybe(const Tensor& t) { return t.defined() ? std::optional<Tensor>(t) : std::nullopt; }

}  // namespace

Conv2d::Conv2d(ParamInit& init, std::int64_t in, std::int64_t out, int kernel, ops::Conv2dOptions o, bool with_bias)
    : opt(o) {
  if (in % o.groups != 0 || out % o.groups != 0)
    throw ShapeError("Conv2d: channels " + std::to_string(in) + "→" + std::to_string(out) + " not divisible by groups " +
                     std::to_string(o.groups));
  const std::int64_t fan_in = in / o.groups * kernel * kernel;
  weight = add_param("weight", init.fan_in_uniform({out, in / o.groups, kernel, kernel}, fan_in));
  if (with_bias) bias = add_param("bias", init.fan_in_uniform({out}, fan_in));
}

std::unique_ptr<Conv2d> Conv2d::same(ParamInit& init, std::int64_t in, std::int64_t out, int kernel, int dilation,
                                     bool with_bias) {
  return std::make_unique<Conv2d>(init, in, out, kernel, ops::Conv2dOptions{1, dilation * (kernel / 2), dilation, 1},
                                  with_bias);
}

Tensor Conv2d::forward(const Tensor& x) { return ops::conv2d(x, weight, maybe(bias), opt); }

ConvTranspose2d::ConvTranspose2d(ParamInit& init, std::int64_t in, std::int64_t out, int kernel, int s,
                                 bool with_bias)
    : stride(s) {
  const std::int64_t fan_in = out * kernel * kernel;
  weight = add_param("weight", init.fan_in_uniform({in, out, kernel, kernel}, fan_in));
  if (with_bias) bias = add_param("bias", init.fan_in_uniform({out}, fan_in));
}

Tensor ConvTranspose2d::forward(const Tensor& x) { return ops::conv_transpose2d(x, weight, maybe(bias), stride, 0); }

Linear::Linear(ParamInit& init, std::int64_t in, std::int64_t out, bool with_bias) {
  weight = add_param("weight", init.fan_in_uniform({in, out}, in));
  if (with_bias) bias = add_param("bias", init.fan_in_uniform({out}, in));
}

Tensor Linear::forward(const Tensor& x) { return kernels::linear(x, weight, bias); }

LayerNorm::LayerNorm(ParamInit& init, std::int64_t dim, Layout l) : layout(l) {
  gamma = add_param("weight", init.ones({dim}));
  beta = add_param("bias", init.zeros({dim}));
}

Tensor LayerNorm::forward(const Tensor& x) {
  return layout == Layout::channels_last ? kernels::layer_norm_last(x, gamma, beta)
                                         : kernels::layer_norm_channels(x, gamma, beta);
}

InstanceNorm2d::InstanceNorm2d(ParamInit& init, std::int64_t channels) {
  gamma = add_param("weight", init.ones({channels}));
  beta = add_param("bias", init.zeros({channels}));
}

Tensor InstanceNorm2d::forward(const Tensor& x) {
  const Shape cs{1, x.dim(1), 1, 1};
  return ops::add(ops::mul(ops::instance_norm(x), ops::reshape(gamma, cs)), ops::reshape(beta, cs));
}

ConvNormAct::ConvNormAct(ParamInit& init, std::int64_t in, std::int64_t out, int dilation, int kernel) {
  conv_ = add_module("conv", Conv2d::same(init, in, out, kernel, dilation));
  norm_ = add_module("norm", std::make_unique<InstanceNorm2d>(init, out));
}

Tensor ConvNormAct::forward(const Tensor& x) { return ops::leaky_relu(norm_->forward(conv_->forward(x)), 0.01); }

DepthwiseSeparableConv::DepthwiseSeparableConv(ParamInit& init, std::int64_t in, std::int64_t out, int kernel,
                                               bool with_bias, bool identity_init) {
  const std::int64_t k2 = static_cast<std::int64_t>(kernel) * kernel;
  if (identity_init) {
    std::vector<double> dw(static_cast<std::size_t>(in * k2), 0.0);
    for (std::int64_t c = 0; c < in; ++c) dw[c * k2 + (kernel / 2) * kernel + kernel / 2] = 1.0;
    dw_weight = add_param("dw_weight", init.values({in, 1, kernel, kernel}, dw));
    if (in == out) {
      std::vector<double> pw(static_cast<std::size_t>(out * in), 0.0);
      for (std::int64_t c = 0; c < in; ++c) pw[c * in + c] = 1.0;
      pw_weight = add_param("pw_weight", init.values({out, in, 1, 1}, pw));
    } else {
      pw_weight = add_param("pw_weight", init.fan_in_uniform({out, in, 1, 1}, in));
    }
  } else {
    dw_weight = add_param("dw_weight", init.fan_in_uniform({in, 1, kernel, kernel}, k2));
    pw_weight = add_param("pw_weight", init.fan_in_uniform({out, in, 1, 1}, in));
  }
  if (with_bias) {
    dw_bias = add_param("dw_bias", init.zeros({in}));
    pw_bias = add_param("pw_bias", init.zeros({out}));
  }
}

Tensor DepthwiseSeparableConv::forward(const Tensor& x) {
  return kernels::depthwise_separable_conv(x, dw_weight, pw_weight, dw_bias, pw_bias);
}

GatedSpatialConv::GatedSpatialConv(ParamInit& init, std::int64_t c) {
  w.feat_w = add_param("feat_weight", init.fan_in_uniform({c, c, 3, 3}, c * 9));
  w.feat_b = add_param("feat_bias", init.fan_in_uniform({c}, c * 9));
  w.gate_w = add_param("gate_weight", init.fan_in_uniform({c, c, 1, 1}, c));
  w.gate_b = add_param("gate_bias", init.fan_in_uniform({c}, c));
}

Tensor GatedSpatialConv::forward(const Tensor& x) { return kernels::gated_spatial_conv(x, w); }

ResidualAdapter::ResidualAdapter(ParamInit& init, std::int64_t in, std::int64_t out) {
  conv_ = add_module("conv", std::make_unique<DepthwiseSeparableConv>(init, in, out, 3, false, true));
}

Tensor ResidualAdapter::forward(const Tensor& x_in, const Tensor& y_block) {
  if (x_in.rank() != 4 || y_block.rank() != 4 || x_in.dim(2) != y_block.dim(2) || x_in.dim(3) != y_block.dim(3))
    throw ShapeError("residual_adapter: spatial mismatch " + shape_str(x_in.shape()) + " vs " +
                     shape_str(y_block.shape()));
  return ops::add(y_block, conv_->forward(x_in));
}

Mlp::Mlp(ParamInit& init, std::int64_t dim, std::int64_t hidden) {
  fc1_ = add_module("fc1", std::make_unique<Linear>(init, dim, hidden));
  fc2_ = add_module("fc2", std::make_unique<Linear>(init, hidden, dim));
}

Tensor Mlp::forward(const Tensor& x) { return fc2_->forward(ops::gelu(fc1_->forward(x))); }

}  // namespace nnuzoo
