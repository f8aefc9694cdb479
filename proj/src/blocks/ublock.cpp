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

#include "nnuzoo/blocks/ublock.hpp"

#include <cmath>

namespace nnuzoo {

using kernels::Traversal;

std::string block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::RSU: return "RSU";
    case BlockKind::RSU_F: return "RSU_F";
    case BlockKind::UNETR_B: return "UNETR_B";
    case BlockKind::SWT_B: return "SWT_B";
    case BlockKind::SS2D_B: return "SS2D_B";
    case BlockKind::ALT1DM_B: return "ALT1DM_B";
    case BlockKind::MAMBAND_B: return "MAMBAND_B";
  }
  return "?";
}

BlockKind block_kind_from_name(const std::string& name) {
  for (auto k : {BlockKind::RSU, BlockKind::RSU_F, BlockKind::UNETR_B, BlockKind::SWT_B, BlockKind::SS2D_B,
                 BlockKind::ALT1DM_B, BlockKind::MAMBAND_B})
    if (block_kind_name(k) == name) return k;
  throw ValueError("unknown block kind '" + name + "'");
}

void UBlockSpec::validate() const {
  if (depth < 1) throw ValueError("UBlockSpec: depth must be >= 1");
  if (static_cast<int>(scale_schedule.size()) != depth)
    throw ValueError("UBlockSpec: scale_schedule has " + std::to_string(scale_schedule.size()) +
                     " entries, depth is " + std::to_string(depth));
  if (in_ch < 1 || mid_ch < 1 || out_ch < 1) throw ValueError("UBlockSpec: channel counts must be >= 1");
  for (int s : scale_schedule)
    if (s < 1) throw ValueError("UBlockSpec: scale factors must be >= 1");
  if ((kind == BlockKind::RSU || kind == BlockKind::RSU_F) && depth < 2)
    throw ValueError("UBlockSpec: " + block_kind_name(kind) + " needs depth >= 2");
  if (kind == BlockKind::RSU && (scale_schedule.front() != 1 || scale_schedule.back() != 1))
    throw ValueError("UBlockSpec: RSU schedule must start and end with 1 (full-resolution top, dilated bottom)");
  if (kind == BlockKind::UNETR_B)
    for (int s : scale_schedule)
      if (s != 2) throw ValueError("UBlockSpec: UNETR_B levels each use patch size 2");
}

std::int64_t UBlockSpec::downsample_factor() const {
  std::int64_t f = 1;
  for (int s : scale_schedule) f *= s;
  return f;
}

std::vector<int> default_schedule(BlockKind kind, int depth) {
  std::vector<int> s(static_cast<std::size_t>(std::max(depth, 0)), kind == BlockKind::RSU_F ? 1 : 2);
  if (kind == BlockKind::RSU && depth >= 1) {
    s.front() = 1;
    s.back() = 1;
  }
  return s;
}

void UBlock::check_input(const Tensor& x) const {
  if (x.rank() != 4 || x.dim(1) != spec_.in_ch)
    throw ShapeError(block_kind_name(spec_.kind) + ": expected B×" + std::to_string(spec_.in_ch) + "×H×W, got " +
                     shape_str(x.shape()));
  const auto f = spec_.downsample_factor();
  if (x.dim(2) % f != 0 || x.dim(3) % f != 0)
    throw ShapeError(block_kind_name(spec_.kind) + ": input " + std::to_string(x.dim(2)) + "×" +
                     std::to_string(x.dim(3)) + " not divisible by " + std::to_string(f));
}

Traversal alternating_order(int index) {
  static constexpr Traversal kAlt[4] = {Traversal::row_forward, Traversal::col_forward, Traversal::row_backward,
                                        Traversal::col_backward};
  return kAlt[((index % 4) + 4) % 4];
}

Traversal nd_order(int seed, int layer) {
  static constexpr Traversal kNd[4] = {Traversal::row_forward, Traversal::row_backward, Traversal::col_forward,
                                       Traversal::col_backward};
  return kNd[(((seed + layer) % 4) + 4) % 4];
}

Tensor sinusoid_position_2d(std::int64_t h, std::int64_t w, std::int64_t D, DType dtype) {
  const std::int64_t half = D / 2;
  std::vector<double> pe(static_cast<std::size_t>(h * w * D), 0.0);
  for (std::int64_t r = 0; r < h; ++r)
    for (std::int64_t c = 0; c < w; ++c)
      for (std::int64_t k = 0; k < half / 2; ++k) {
        const double freq = std::pow(10000.0, -2.0 * static_cast<double>(k) / static_cast<double>(half));
        double* row = &pe[(r * w + c) * D];
        row[2 * k] = std::sin(r * freq);
        row[2 * k + 1] = std::cos(r * freq);
        row[half + 2 * k] = std::sin(c * freq);
        row[half + 2 * k + 1] = std::cos(c * freq);
      }
  return Tensor::from_vector({1, h * w, D}, pe, dtype);
}

namespace {

// Convolutional U-Block with an inner residual (RSU) or its dilated,
// resolution-preserving variant (RSU_F).
class RsuBlock : public UBlock {
 public:
  RsuBlock(const UBlockSpec& spec, ParamInit& init) : UBlock(spec) {
    const bool dilated = spec.kind == BlockKind::RSU_F;
    const int L = spec.depth;
    for (int i = 0; i < L; ++i) dil_.push_back(dilated ? (1 << i) : (i == L - 1 ? 2 : 1));
    in_ = add_module("in", std::make_unique<ConvNormAct>(init, spec.in_ch, spec.out_ch));
    for (int i = 0; i < L; ++i)
      enc_.push_back(add_module("enc" + std::to_string(i + 1),
                                std::make_unique<ConvNormAct>(init, i == 0 ? spec.out_ch : spec.mid_ch, spec.mid_ch,
                                                              dil_[i])));
    dec_.resize(static_cast<std::size_t>(L - 1));
    for (int i = L - 2; i >= 0; --i)
      dec_[i] = add_module("dec" + std::to_string(i + 1),
                           std::make_unique<ConvNormAct>(init, 2 * spec.mid_ch, i == 0 ? spec.out_ch : spec.mid_ch,
                                                         dil_[i]));
  }

  Tensor forward(const Tensor& x) override {
    check_input(x);
    const auto& s = spec().scale_schedule;
    Tensor hxin = in_->forward(x);
    std::vector<Tensor> feats;
    Tensor h = hxin;
    for (std::size_t i = 0; i < enc_.size(); ++i) {
      if (i > 0 && s[i] > 1) h = ops::max_pool2d(h, s[i], s[i]);
      h = enc_[i]->forward(h);
      feats.push_back(h);
    }
    Tensor d = feats.back();
    for (int i = static_cast<int>(dec_.size()) - 1; i >= 0; --i) {
      d = dec_[i]->forward(ops::concat({d, feats[i]}, 1));
      if (i > 0 && s[i] > 1) d = ops::upsample2d(d, s[i], ops::UpsampleMode::bilinear);
    }
    return ops::add(d, hxin);
  }

 private:
  std::vector<int> dil_;
  ConvNormAct* in_;
  std::vector<ConvNormAct*> enc_;
  std::vector<ConvNormAct*> dec_;
};

// A stack of kernel layers at one level, run in order.
class LayerStack : public Module {
 public:
  void push(std::unique_ptr<Module> m) { layers_.push_back(add_module(std::to_string(layers_.size()), std::move(m))); }
  Tensor forward(const Tensor& x) override {
    Tensor h = x;
    for (auto* l : layers_) h = l->forward(h);
    return h;
  }

 private:
  std::vector<Module*> layers_;
};

// U-Block whose levels are stacks of attention / state-space layers joined by
// patch merging and expansion, with additive skips and an outer residual
// adapter.
class KernelUBlock : public UBlock {
 public:
  KernelUBlock(const UBlockSpec& spec, ParamInit& init) : UBlock(spec) {
    const auto& a = spec.attrs;
    const int n_layers = static_cast<int>(a.get_int("layers", 2));
    const int window = static_cast<int>(a.get_int("window", 8));
    const auto head_dim = a.get_int("head_dim", 32);
    const double mlp_ratio = a.get_double("mlp_ratio", 4.0);
    MambaOptions mo{a.get_int("state", 16), a.get_int("expand", 2), static_cast<int>(a.get_int("conv_width", 3))};
    const int L = spec.depth;
    const auto& s = spec.scale_schedule;

    std::vector<std::int64_t> ch(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) ch[l] = (l == 0 ? spec.mid_ch : ch[l - 1]) * (s[l] > 1 ? 2 : 1);
    auto prev_ch = [&](int l) { return l == 0 ? spec.mid_ch : ch[l - 1]; };

    int layer_counter = 0;
    auto make_stack = [&](std::int64_t c) {
      auto stack = std::make_unique<LayerStack>();
      if (spec.kind == BlockKind::ALT1DM_B) stack->push(std::make_unique<GatedSpatialConv>(init, c));
      for (int j = 0; j < n_layers; ++j) {
        switch (spec.kind) {
          case BlockKind::SWT_B:
            stack->push(std::make_unique<SwinLayer>(init, c, heads_for(c, head_dim), window, j % 2 == 1, mlp_ratio));
            break;
          case BlockKind::SS2D_B: stack->push(std::make_unique<VssLayer>(init, c, mo)); break;
          case BlockKind::ALT1DM_B: {
            const auto order = alternating_order(spec.traversal_seed);
            orders_.push_back(order);
            stack->push(std::make_unique<MambaLayer>(init, c, mo, order));
            break;
          }
          case BlockKind::MAMBAND_B: {
            const auto order = nd_order(spec.traversal_seed, layer_counter);
            orders_.push_back(order);
            stack->push(std::make_unique<MambaLayer>(init, c, mo, order));
            break;
          }
          default: throw ValueError("KernelUBlock: unsupported kind " + block_kind_name(spec.kind));
        }
        ++layer_counter;
      }
      return stack;
    };

    stem_ = add_module("stem", std::make_unique<PatchMerge>(init, spec.in_ch, spec.mid_ch, 1, false));
    for (int l = 0; l < L; ++l) {
      down_.push_back(s[l] > 1 || ch[l] != prev_ch(l)
                          ? add_module("down" + std::to_string(l),
                                       std::make_unique<PatchMerge>(init, prev_ch(l), ch[l], s[l], s[l] > 1))
                          : nullptr);
      enc_.push_back(add_module("enc" + std::to_string(l), make_stack(ch[l])));
    }
    up_.resize(static_cast<std::size_t>(L));
    dec_.resize(static_cast<std::size_t>(L));
    for (int l = L - 1; l >= 0; --l) {
      up_[l] = s[l] > 1 || ch[l] != prev_ch(l)
                   ? add_module("up" + std::to_string(l),
                                std::make_unique<PatchExpand>(init, ch[l], prev_ch(l), s[l], s[l] > 1))
                   : nullptr;
      if (l >= 1) dec_[l - 1] = add_module("dec" + std::to_string(l - 1), make_stack(ch[l - 1]));
    }
    head_ = add_module("head", std::make_unique<PatchMerge>(init, spec.mid_ch, spec.out_ch, 1, false));
    adapter_ = add_module("adapter", std::make_unique<ResidualAdapter>(init, spec.in_ch, spec.out_ch));
  }

  Tensor forward(const Tensor& x) override {
    check_input(x);
    const int L = spec().depth;
    Tensor stem = stem_->forward(x);
    std::vector<Tensor> feats;
    Tensor h = stem;
    for (int l = 0; l < L; ++l) {
      if (down_[l]) h = down_[l]->forward(h);
      h = enc_[l]->forward(h);
      feats.push_back(h);
    }
    Tensor d = feats.back();
    for (int l = L - 1; l >= 0; --l) {
      if (up_[l]) d = up_[l]->forward(d);
      d = ops::add(d, l >= 1 ? feats[l - 1] : stem);
      if (l >= 1) d = dec_[l - 1]->forward(d);
    }
    return adapter_->forward(x, head_->forward(d));
  }

  std::vector<Traversal> traversals() const override { return orders_; }

 private:
  PatchMerge* stem_;
  std::vector<PatchMerge*> down_;
  std::vector<LayerStack*> enc_;
  std::vector<PatchExpand*> up_;
  std::vector<LayerStack*> dec_;
  PatchMerge* head_;
  ResidualAdapter* adapter_;
  std::vector<Traversal> orders_;
};

// Tokenizer + transformer encoder + progressive transposed-conv decoder.
class UnetrBlock : public UBlock {
 public:
  UnetrBlock(const UBlockSpec& spec, ParamInit& init) : UBlock(spec) {
    const auto& a = spec.attrs;
    embed_ = a.get_int("embed", 4 * spec.mid_ch);
    if (embed_ % 4 != 0) throw ValueError("UNETR_B: embed must be a multiple of 4");
    const auto P = static_cast<int>(spec.downsample_factor());
    const int n_layers = static_cast<int>(a.get_int("layers", 2));
    stem_ = add_module("stem", std::make_unique<ConvNormAct>(init, spec.in_ch, spec.mid_ch));
    patch_ = add_module("patch", std::make_unique<Conv2d>(init, spec.in_ch, embed_, P, ops::Conv2dOptions{P, 0, 1, 1}));
    for (int j = 0; j < n_layers; ++j)
      layers_.push_back(add_module("layer" + std::to_string(j),
                                   std::make_unique<TransformerLayer>(init, embed_, heads_for(embed_, a.get_int("head_dim", 32)),
                                                                      a.get_double("mlp_ratio", 4.0))));
    norm_ = add_module("norm", std::make_unique<LayerNorm>(init, embed_));
    std::int64_t c = embed_;
    for (int l = spec.depth - 1; l >= 0; --l) {
      const std::int64_t next = spec.mid_ch << l;
      ups_.push_back(add_module("up" + std::to_string(l), std::make_unique<ConvTranspose2d>(init, c, next, 2, 2)));
      refine_.push_back(add_module("refine" + std::to_string(l), std::make_unique<ConvNormAct>(init, next, next)));
      c = next;
    }
    fuse_ = add_module("fuse", std::make_unique<ConvNormAct>(init, 2 * spec.mid_ch, spec.mid_ch));
    head_ = add_module("head", std::make_unique<Conv2d>(init, spec.mid_ch, spec.out_ch, 1));
    adapter_ = add_module("adapter", std::make_unique<ResidualAdapter>(init, spec.in_ch, spec.out_ch));
  }

  // Inputs whose size is not a multiple of the patch are zero-padded at the
  // bottom/right and the output is cropped back.
  Tensor forward(const Tensor& x_in) override {
    if (x_in.rank() != 4 || x_in.dim(1) != spec().in_ch)
      throw ShapeError("UNETR_B: expected B×" + std::to_string(spec().in_ch) + "×H×W, got " + shape_str(x_in.shape()));
    const auto P = spec().downsample_factor();
    const auto H = x_in.dim(2), W = x_in.dim(3);
    const auto ph = (P - H % P) % P, pw = (P - W % P) % P;
    Tensor x = ph || pw ? ops::pad(x_in, {{0, 0}, {0, 0}, {0, ph}, {0, pw}}) : x_in;
    Tensor y = run(x);
    if (ph) y = ops::slice(y, 2, 0, H);
    if (pw) y = ops::slice(y, 3, 0, W);
    return y;
  }

 private:
  Tensor run(const Tensor& x) {
    Tensor t = patch_->forward(x);  // B×D×h×w
    const auto B = t.dim(0), h = t.dim(2), w = t.dim(3);
    Tensor tok = ops::permute(ops::reshape(t, {B, embed_, h * w}), {0, 2, 1});
    tok = ops::add(tok, sinusoid_position_2d(h, w, embed_, x.dtype()));
    for (auto* l : layers_) tok = l->forward(tok);
    tok = norm_->forward(tok);
    Tensor d = ops::reshape(ops::permute(tok, {0, 2, 1}), {B, embed_, h, w});
    for (std::size_t i = 0; i < ups_.size(); ++i) d = refine_[i]->forward(ups_[i]->forward(d));
    d = fuse_->forward(ops::concat({d, stem_->forward(x)}, 1));
    return adapter_->forward(x, head_->forward(d));
  }

  std::int64_t embed_;
  ConvNormAct* stem_;
  Conv2d* patch_;
  std::vector<TransformerLayer*> layers_;
  LayerNorm* norm_;
  std::vector<ConvTranspose2d*> ups_;
  std::vector<ConvNormAct*> refine_;
  ConvNormAct* fuse_;
  Conv2d* head_;
  ResidualAdapter* adapter_;
};

}  // namespace

std::unique_ptr<UBlock> build_ublock(const UBlockSpec& spec, ParamInit& init) {
  spec.validate();
  switch (spec.kind) {
    case BlockKind::RSU:
    case BlockKind::RSU_F: return std::make_unique<RsuBlock>(spec, init);
    case BlockKind::UNETR_B: return std::make_unique<UnetrBlock>(spec, init);
    default: return std::make_unique<KernelUBlock>(spec, init);
  }
}

}  // namespace nnuzoo
