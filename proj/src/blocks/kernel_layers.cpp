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

#include "nnuzoo/blocks/kernel_layers.hpp"

#include <cmath>

#include "nnuzoo/kernels/linear.hpp"

namespace nnuzoo {

int heads_for(std::int64_t channels, std::int64_t head_dim) {
  std::int64_t h = std::max<std::int64_t>(1, channels / std::max<std::int64_t>(head_dim, 1));
  while (channels % h != 0) --h;
  return static_cast<int>(h);
}

ScanProjectionModule::ScanProjectionModule(ParamInit& init, std::int64_t E, std::int64_t R, std::int64_t N) {
  p.x_proj = add_param("x_proj", init.fan_in_uniform({E, R + 2 * N}, E));
  const double dt_std = 1.0 / std::sqrt(static_cast<double>(R));
  p.dt_proj = add_param("dt_proj", init.uniform({R, E}, -dt_std, dt_std));
  std::vector<double> dt_bias(static_cast<std::size_t>(E)), a_log(static_cast<std::size_t>(E * N));
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e-1));
  for (auto& b : dt_bias) {
    const double dt = std::exp(u(init.rng()));
    b = dt + std::log(-std::expm1(-dt));
  }
  for (std::int64_t e = 0; e < E; ++e)
    for (std::int64_t n = 0; n < N; ++n) a_log[e * N + n] = std::log(static_cast<double>(n + 1));
  p.dt_bias = add_param("dt_bias", init.values({E}, dt_bias));
  p.A_log = add_param("A_log", init.values({E, N}, a_log));
  p.D = add_param("D", init.ones({E}));
}

Attention::Attention(ParamInit& init, std::int64_t dim, int h) : heads(h) {
  if (dim % h != 0)
    throw ShapeError("Attention: dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(h));
  auto mat = [&](const char* name) { return add_param(name, init.fan_in_uniform({dim, dim}, dim)); };
  auto vec = [&](const char* name) { return add_param(name, init.zeros({dim})); };
  w.q_w = mat("q_weight");
  w.q_b = vec("q_bias");
  w.k_w = mat("k_weight");
  w.k_b = vec("k_bias");
  w.v_w = mat("v_weight");
  w.v_b = vec("v_bias");
  w.out_w = mat("out_weight");
  w.out_b = vec("out_bias");
}

Tensor Attention::forward(const Tensor& x) { return kernels::mhsa(x, w, heads); }

TransformerLayer::TransformerLayer(ParamInit& init, std::int64_t dim, int heads, double mlp_ratio) {
  norm1_ = add_module("norm1", std::make_unique<LayerNorm>(init, dim));
  attn_ = add_module("attn", std::make_unique<Attention>(init, dim, heads));
  norm2_ = add_module("norm2", std::make_unique<LayerNorm>(init, dim));
  mlp_ = add_module("mlp", std::make_unique<Mlp>(init, dim, static_cast<std::int64_t>(dim * mlp_ratio)));
}

Tensor TransformerLayer::forward(const Tensor& x) {
  Tensor h = ops::add(x, attn_->forward(norm1_->forward(x)));
  return ops::add(h, mlp_->forward(norm2_->forward(h)));
}

SwinLayer::SwinLayer(ParamInit& init, std::int64_t dim, int heads, int window, bool shifted, double mlp_ratio)
    : window_(window), shifted_(shifted) {
  norm1_ = add_module("norm1", std::make_unique<LayerNorm>(init, dim));
  attn_ = add_module("attn", std::make_unique<Attention>(init, dim, heads));
  bias_table_ = add_param("rel_bias", init.zeros({kernels::relative_bias_rows(window), heads}));
  norm2_ = add_module("norm2", std::make_unique<LayerNorm>(init, dim));
  mlp_ = add_module("mlp", std::make_unique<Mlp>(init, dim, static_cast<std::int64_t>(dim * mlp_ratio)));
}

namespace {

// Rows of a (2w-1)² table covering the offsets of a smaller window v.
std::vector<std::int64_t> central_rows(int w, int v) {
  std::vector<std::int64_t> rows;
  for (int dy = -(v - 1); dy <= v - 1; ++dy)
    for (int dx = -(v - 1); dx <= v - 1; ++dx) rows.push_back((dy + w - 1) * (2 * w - 1) + dx + w - 1);
  return rows;
}

}  // namespace

Tensor SwinLayer::forward(const Tensor& x) {
  const auto H = x.dim(2), W = x.dim(3);
  const int win = static_cast<int>(std::min<std::int64_t>({window_, H, W}));
  const int shift = shifted_ && H > win && W > win ? win / 2 : 0;
  Tensor table = win == window_ ? bias_table_ : ops::index_select(bias_table_, 0, central_rows(window_, win));
  Tensor t = ops::permute(x, {0, 2, 3, 1});
  t = ops::add(t, kernels::window_attention(norm1_->forward(t), attn_->w, win, shift, attn_->heads, table));
  t = ops::add(t, mlp_->forward(norm2_->forward(t)));
  return ops::permute(t, {0, 3, 1, 2});
}

VssLayer::VssLayer(ParamInit& init, std::int64_t dim, const MambaOptions& opt) : inner_(opt.expand * dim) {
  const std::int64_t R = (dim + 15) / 16;
  norm_ = add_module("norm", std::make_unique<LayerNorm>(init, dim, LayerNorm::Layout::channels_first));
  in_proj_ = add_module("in_proj", std::make_unique<Conv2d>(init, dim, 2 * inner_, 1, ops::Conv2dOptions{}, false));
  dwconv_ = add_module("dwconv", std::make_unique<Conv2d>(init, inner_, inner_, opt.conv_width,
                                                          ops::Conv2dOptions{1, opt.conv_width / 2, 1,
                                                                             static_cast<int>(inner_)}));
  for (std::size_t d = 0; d < dirs_.size(); ++d)
    dirs_[d] = add_module("scan" + std::to_string(d),
                          std::make_unique<ScanProjectionModule>(init, inner_, R, opt.state));
  out_norm_ = add_module("out_norm", std::make_unique<LayerNorm>(init, inner_, LayerNorm::Layout::channels_first));
  out_proj_ = add_module("out_proj", std::make_unique<Conv2d>(init, inner_, dim, 1, ops::Conv2dOptions{}, false));
}

Tensor VssLayer::forward(const Tensor& x) {
  Tensor xz = in_proj_->forward(norm_->forward(x));
  Tensor xs = ops::silu(dwconv_->forward(ops::slice(xz, 1, 0, inner_)));
  Tensor z = ops::slice(xz, 1, inner_, 2 * inner_);
  Tensor y = kernels::ss2d(xs, {dirs_[0]->p, dirs_[1]->p, dirs_[2]->p, dirs_[3]->p});
  y = ops::mul(out_norm_->forward(y), ops::silu(z));
  return ops::add(x, out_proj_->forward(y));
}

MambaLayer::MambaLayer(ParamInit& init, std::int64_t dim, const MambaOptions& opt, kernels::Traversal order)
    : inner_(opt.expand * dim), conv_width_(opt.conv_width), order_(order) {
  const std::int64_t R = (dim + 15) / 16;
  norm_ = add_module("norm", std::make_unique<LayerNorm>(init, dim));
  in_proj_ = add_module("in_proj", std::make_unique<Linear>(init, dim, 2 * inner_, false));
  conv_w_ = add_param("conv_weight", init.fan_in_uniform({inner_, 1, 1, opt.conv_width}, opt.conv_width));
  conv_b_ = add_param("conv_bias", init.fan_in_uniform({inner_}, opt.conv_width));
  scan_ = add_module("scan", std::make_unique<ScanProjectionModule>(init, inner_, R, opt.state));
  out_proj_ = add_module("out_proj", std::make_unique<Linear>(init, inner_, dim, false));
}

Tensor MambaLayer::forward(const Tensor& x) {
  const auto B = x.dim(0), H = x.dim(2), W = x.dim(3), L = H * W;
  Tensor seq = kernels::to_sequence(x, order_);  // B×L×C
  Tensor xz = in_proj_->forward(norm_->forward(seq));
  Tensor xs = ops::slice(xz, 2, 0, inner_);
  Tensor z = ops::slice(xz, 2, inner_, 2 * inner_);
  // Causal depthwise conv along the sequence: B×E×1×L with left padding.
  Tensor c = ops::reshape(ops::permute(xs, {0, 2, 1}), {B, inner_, 1, L});
  c = ops::pad(c, {{0, 0}, {0, 0}, {0, 0}, {conv_width_ - 1, 0}});
  c = ops::conv2d(c, conv_w_, conv_b_, ops::Conv2dOptions{1, 0, 1, static_cast<int>(inner_)});
  xs = ops::silu(ops::permute(ops::reshape(c, {B, inner_, L}), {0, 2, 1}));
  Tensor y = ops::mul(kernels::selective_scan_tokens(xs, scan_->p), ops::silu(z));
  return ops::add(x, kernels::from_sequence(out_proj_->forward(y), order_, H, W));
}

PatchMerge::PatchMerge(ParamInit& init, std::int64_t in, std::int64_t out, int scale, bool normalize)
    : scale_(scale) {
  const std::int64_t cin = in * scale * scale;
  p_.normalize = normalize;
  if (normalize) {
    p_.norm_gamma = add_param("norm_weight", init.ones({cin}));
    p_.norm_beta = add_param("norm_bias", init.zeros({cin}));
  }
  p_.weight = add_param("weight", init.fan_in_uniform({out, cin, 1, 1}, cin));
}

Tensor PatchMerge::forward(const Tensor& x) { return kernels::patch_merge(x, scale_, p_); }

PatchExpand::PatchExpand(ParamInit& init, std::int64_t in, std::int64_t out, int scale, bool normalize)
    : scale_(scale) {
  p_.normalize = normalize;
  p_.weight = add_param("weight", init.fan_in_uniform({out * scale * scale, in, 1, 1}, in));
  if (normalize) {
    p_.norm_gamma = add_param("norm_weight", init.ones({out}));
    p_.norm_beta = add_param("norm_bias", init.zeros({out}));
  }
}

Tensor PatchExpand::forward(const Tensor& x) { return kernels::patch_expand(x, scale_, p_); }

}  // namespace nnuzoo
