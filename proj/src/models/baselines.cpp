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

#include <cmath>

#include "models/builders.hpp"

namespace nnuzoo::detail_models {

namespace {

using Ints = std::vector<std::int64_t>;

int log2_exact(std::int64_t v, const char* what) {
  int k = 0;
  while ((std::int64_t{1} << k) < v) ++k;
  if ((std::int64_t{1} << k) != v) throw ValueError(std::string(what) + " must be a power of two");
  return k;
}

// conv3×3 (stride s) → instance norm → leaky ReLU.
class StridedConvNormAct : public Module {
 public:
  StridedConvNormAct(ParamInit& init, std::int64_t in, std::int64_t out, int stride) {
    conv_ = add_module("conv", std::make_unique<Conv2d>(init, in, out, 3, ops::Conv2dOptions{stride, 1, 1, 1}));
    norm_ = add_module("norm", std::make_unique<InstanceNorm2d>(init, out));
  }
  Tensor forward(const Tensor& x) override { return ops::leaky_relu(norm_->forward(conv_->forward(x)), 0.01); }

 private:
  Conv2d* conv_;
  InstanceNorm2d* norm_;
};

// Modules applied in sequence.
class Sequential : public Module {
 public:
  template <class M>
  M* push(std::unique_ptr<M> m) {
    M* raw = add_module(std::to_string(items_.size()), std::move(m));
    items_.push_back(raw);
    return raw;
  }
  Tensor forward(const Tensor& x) override {
    Tensor h = x;
    for (auto* m : items_) h = m->forward(h);
    return h;
  }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<Module*> items_;
};

// Two conv-norm-act layers with a (projected) identity path.
class ResBlock : public Module {
 public:
  ResBlock(ParamInit& init, std::int64_t in, std::int64_t out) {
    a_ = add_module("conv1", std::make_unique<ConvNormAct>(init, in, out));
    b_ = add_module("conv2", std::make_unique<ConvNormAct>(init, out, out));
    if (in != out) skip_ = add_module("skip", std::make_unique<Conv2d>(init, in, out, 1));
  }
  Tensor forward(const Tensor& x) override {
    return ops::add(b_->forward(a_->forward(x)), skip_ ? skip_->forward(x) : x);
  }

 private:
  ConvNormAct* a_;
  ConvNormAct* b_;
  Conv2d* skip_ = nullptr;
};

Tensor tokens_of(const Tensor& map) {
  const auto B = map.dim(0), C = map.dim(1), H = map.dim(2), W = map.dim(3);
  return ops::permute(ops::reshape(map, {B, C, H * W}), {0, 2, 1});
}

Tensor map_of(const Tensor& tok, std::int64_t H, std::int64_t W) {
  const auto B = tok.dim(0), C = tok.dim(2);
  return ops::reshape(ops::permute(tok, {0, 2, 1}), {B, C, H, W});
}

// Plain convolutional U-Net: per stage `convs` conv-norm-act layers (the
// first strided below the top stage), transposed-conv upsampling and
// concatenating skips.
class PlainUNet : public Model {
 public:
  PlainUNet(const ModelConfig& cfg, ParamInit& init) : Model(cfg) {
    const Ints f = cfg.attrs.get_ints("features");
    const auto convs = cfg.attrs.get_int("convs");
    const auto n = f.size();
    for (std::size_t s = 0; s < n; ++s) {
      auto stage = std::make_unique<Sequential>();
      for (std::int64_t j = 0; j < convs; ++j)
        stage->push(std::make_unique<StridedConvNormAct>(init, j == 0 ? (s == 0 ? cfg.in_channels : f[s - 1]) : f[s],
                                                         f[s], j == 0 && s > 0 ? 2 : 1));
      enc_.push_back(add_module("enc" + std::to_string(s), std::move(stage)));
    }
    up_.resize(n - 1);
    dec_.resize(n - 1);
    for (int s = static_cast<int>(n) - 2; s >= 0; --s) {
      up_[s] = add_module("up" + std::to_string(s), std::make_unique<ConvTranspose2d>(init, f[s + 1], f[s], 2, 2));
      auto stage = std::make_unique<Sequential>();
      for (std::int64_t j = 0; j < convs; ++j)
        stage->push(std::make_unique<StridedConvNormAct>(init, j == 0 ? 2 * f[s] : f[s], f[s], 1));
      dec_[s] = add_module("dec" + std::to_string(s), std::move(stage));
    }
    head_ = add_module("head", std::make_unique<Conv2d>(init, f[0], cfg.num_classes, 1));
  }

  void zero_heads() override { zero_conv(*head_); }

 protected:
  Tensor run(const Tensor& x) override {
    std::vector<Tensor> skips;
    Tensor h = x;
    for (auto* e : enc_) {
      h = e->forward(h);
      skips.push_back(h);
    }
    for (int s = static_cast<int>(dec_.size()) - 1; s >= 0; --s)
      h = dec_[s]->forward(ops::concat({up_[s]->forward(h), skips[s]}, 1));
    return head_->forward(h);
  }

 private:
  std::vector<Sequential*> enc_;
  std::vector<ConvTranspose2d*> up_;
  std::vector<Sequential*> dec_;
  Conv2d* head_;
};

// Vision-transformer encoder on P×P patches; hidden states of evenly spaced
// layers are upsampled into a convolutional decoder with residual blocks.
class Unetr : public Model {
 public:
  Unetr(const ModelConfig& cfg, ParamInit& init) : Model(cfg) {
    const auto& a = cfg.attrs;
    patch_ = static_cast<int>(a.get_int("patch"));
    levels_ = log2_exact(patch_, "UNETR patch");
    hidden_ = a.get_int("hidden");
    const auto n_layers = a.get_int("layers");
    const auto heads = a.get_int("heads");
    const auto fs = a.get_int("feature_size");
    if (hidden_ % heads != 0) throw ValueError("UNETR: hidden size must be divisible by heads");
    if (levels_ < 1 || n_layers < levels_) throw ValueError("UNETR: need patch >= 2 and layers >= log2(patch)");

    embed_ = add_module("patch_embed", std::make_unique<Conv2d>(init, cfg.in_channels, hidden_, patch_,
                                                                ops::Conv2dOptions{patch_, 0, 1, 1}));
    for (std::int64_t j = 0; j < n_layers; ++j)
      layers_.push_back(add_module("layer" + std::to_string(j),
                                   std::make_unique<TransformerLayer>(init, hidden_, static_cast<int>(heads),
                                                                      static_cast<double>(a.get_int("mlp_dim")) /
                                                                          static_cast<double>(hidden_))));
    norm_ = add_module("norm", std::make_unique<LayerNorm>(init, hidden_));
    for (int k = 1; k < levels_; ++k) taps_.push_back(static_cast<int>(k * n_layers / levels_) - 1);

    enc0_ = add_module("enc0", std::make_unique<ResBlock>(init, cfg.in_channels, fs));
    for (int k = 1; k < levels_; ++k) {
      const auto c = fs << k;
      auto chain = std::make_unique<Sequential>();
      chain->push(std::make_unique<ConvTranspose2d>(init, hidden_, c, 2, 2));
      for (int j = 1; j < levels_ - k; ++j) {
        chain->push(std::make_unique<ConvTranspose2d>(init, c, c, 2, 2));
        chain->push(std::make_unique<ResBlock>(init, c, c));
      }
      skip_enc_.push_back(add_module("enc" + std::to_string(k), std::move(chain)));
    }
    std::int64_t c_in = hidden_;
    for (int k = levels_ - 1; k >= 0; --k) {
      const auto c = fs << k;
      dec_up_.push_back(add_module("up" + std::to_string(k), std::make_unique<ConvTranspose2d>(init, c_in, c, 2, 2)));
      dec_res_.push_back(add_module("dec" + std::to_string(k), std::make_unique<ResBlock>(init, 2 * c, c)));
      c_in = c;
    }
    head_ = add_module("head", std::make_unique<Conv2d>(init, fs, cfg.num_classes, 1));
  }

  void zero_heads() override { zero_conv(*head_); }

 protected:
  Tensor run(const Tensor& x) override {
    const auto h = x.dim(2) / patch_, w = x.dim(3) / patch_;
    Tensor tok = ops::add(tokens_of(embed_->forward(x)), sinusoid_position_2d(h, w, hidden_, x.dtype()));
    std::vector<Tensor> tapped;
    for (std::size_t j = 0; j < layers_.size(); ++j) {
      tok = layers_[j]->forward(tok);
      for (int t : taps_)
        if (t == static_cast<int>(j)) tapped.push_back(map_of(tok, h, w));
    }
    Tensor d = map_of(norm_->forward(tok), h, w);
    std::vector<Tensor> skips{enc0_->forward(x)};
    for (std::size_t k = 0; k < skip_enc_.size(); ++k) skips.push_back(skip_enc_[k]->forward(tapped[k]));
    for (std::size_t i = 0; i < dec_up_.size(); ++i) {
      const auto k = static_cast<std::size_t>(levels_ - 1) - i;
      d = dec_res_[i]->forward(ops::concat({dec_up_[i]->forward(d), skips[k]}, 1));
    }
    return head_->forward(d);
  }

 private:
  int patch_, levels_;
  std::int64_t hidden_;
  Conv2d* embed_;
  std::vector<TransformerLayer*> layers_;
  LayerNorm* norm_;
  std::vector<int> taps_;
  ResBlock* enc0_;
  std::vector<Sequential*> skip_enc_;
  std::vector<ConvTranspose2d*> dec_up_;
  std::vector<ResBlock*> dec_res_;
  Conv2d* head_;
};

// Hierarchical shifted-window transformer in a symmetric encoder-decoder
// with patch merging/expansion and concatenating skips.
class SwinUNet : public Model {
 public:
  SwinUNet(const ModelConfig& cfg, ParamInit& init) : Model(cfg) {
    const auto& a = cfg.attrs;
    const auto C = a.get_int("embed");
    const auto P = static_cast<int>(a.get_int("patch"));
    const Ints depths = a.get_ints("depths");
    const Ints depths_dec = a.get_ints("depths_dec");
    const auto hb = a.get_int("heads_base");
    const int window = static_cast<int>(a.get_int("window"));
    const double mlp = a.get_double("mlp_ratio");
    const auto n = depths.size();
    if (depths_dec.size() + 1 != n) throw ValueError("SwT: depths_dec needs one entry fewer than depths");
    if (C % hb != 0) throw ValueError("SwT: embed must be divisible by heads_base");

    auto swin_stack = [&](std::int64_t dim, std::int64_t heads, std::int64_t depth) {
      auto s = std::make_unique<Sequential>();
      for (std::int64_t j = 0; j < depth; ++j)
        s->push(std::make_unique<SwinLayer>(init, dim, static_cast<int>(heads), window, j % 2 == 1, mlp));
      return s;
    };
    embed_ = add_module("patch_embed",
                        std::make_unique<Conv2d>(init, cfg.in_channels, C, P, ops::Conv2dOptions{P, 0, 1, 1}));
    embed_norm_ = add_module("embed_norm", std::make_unique<LayerNorm>(init, C, LayerNorm::Layout::channels_first));
    for (std::size_t i = 0; i < n; ++i) {
      const auto dim = C << i;
      enc_.push_back(add_module("enc" + std::to_string(i), swin_stack(dim, hb << i, depths[i])));
      if (i + 1 < n)
        merge_.push_back(add_module("merge" + std::to_string(i), std::make_unique<PatchMerge>(init, dim, 2 * dim, 2, true)));
    }
    bottleneck_norm_ =
        add_module("bottleneck_norm", std::make_unique<LayerNorm>(init, C << (n - 1), LayerNorm::Layout::channels_first));
    expand_.resize(n - 1);
    reduce_.resize(n - 1);
    dec_.resize(n - 1);
    for (int i = static_cast<int>(n) - 2; i >= 0; --i) {
      const auto dim = C << i;
      expand_[i] = add_module("expand" + std::to_string(i), std::make_unique<PatchExpand>(init, 2 * dim, dim, 2, true));
      reduce_[i] = add_module("reduce" + std::to_string(i), std::make_unique<Conv2d>(init, 2 * dim, dim, 1));
      dec_[i] = add_module("dec" + std::to_string(i), swin_stack(dim, hb << i, depths_dec[i]));
    }
    final_norm_ = add_module("final_norm", std::make_unique<LayerNorm>(init, C, LayerNorm::Layout::channels_first));
    final_expand_ = add_module("final_expand", std::make_unique<PatchExpand>(init, C, C, P, true));
    head_ = add_module("head", std::make_unique<Conv2d>(init, C, cfg.num_classes, 1));
  }

  void zero_heads() override { zero_conv(*head_); }

 protected:
  Tensor run(const Tensor& x) override {
    Tensor h = embed_norm_->forward(embed_->forward(x));
    std::vector<Tensor> skips;
    for (std::size_t i = 0; i < enc_.size(); ++i) {
      h = enc_[i]->forward(h);
      skips.push_back(h);
      if (i < merge_.size()) h = merge_[i]->forward(h);
    }
    h = bottleneck_norm_->forward(h);
    for (int i = static_cast<int>(dec_.size()) - 1; i >= 0; --i) {
      h = ops::concat({expand_[i]->forward(h), skips[i]}, 1);
      h = dec_[i]->forward(reduce_[i]->forward(h));
    }
    return head_->forward(final_expand_->forward(final_norm_->forward(h)));
  }

 private:
  Conv2d* embed_;
  LayerNorm* embed_norm_;
  std::vector<Sequential*> enc_;
  std::vector<PatchMerge*> merge_;
  LayerNorm* bottleneck_norm_;
  std::vector<PatchExpand*> expand_;
  std::vector<Conv2d*> reduce_;
  std::vector<Sequential*> dec_;
  LayerNorm* final_norm_;
  PatchExpand* final_expand_;
  Conv2d* head_;
};

// State-space encoder (VSS layers, GSC + VSS layers, or single-direction
// Mamba layers in alternating orders) with a convolutional U-Net decoder and
// a full-resolution convolutional stem skip.
class MambaUNet : public Model {
 public:
  MambaUNet(const ModelConfig& cfg, ParamInit& init) : Model(cfg) {
    const auto& a = cfg.attrs;
    const auto P = static_cast<int>(a.get_int("patch"));
    const auto stem = a.get_int("stem");
    const Ints dims = a.get_ints("dims");
    const Ints depths = a.get_ints("depths");
    const auto dec_convs = a.get_int("dec_convs");
    if (dims.size() != depths.size() || dims.empty()) throw ValueError("Mamba U-Net: dims and depths must match");
    const MambaOptions mo{a.get_int("state", 16), a.get_int("expand", 2), static_cast<int>(a.get_int("conv_width", 3))};
    const auto n = dims.size();

    auto conv_stack = [&](std::int64_t in, std::int64_t out) {
      auto s = std::make_unique<Sequential>();
      for (std::int64_t j = 0; j < dec_convs; ++j) s->push(std::make_unique<ConvNormAct>(init, j == 0 ? in : out, out));
      return s;
    };
    stem_ = add_module("stem", conv_stack(cfg.in_channels, stem));
    embed_ = add_module("patch_embed",
                        std::make_unique<Conv2d>(init, cfg.in_channels, dims[0], P, ops::Conv2dOptions{P, 0, 1, 1}));
    embed_norm_ =
        add_module("embed_norm", std::make_unique<LayerNorm>(init, dims[0], LayerNorm::Layout::channels_first));
    int mamba_index = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto s = std::make_unique<Sequential>();
      if (cfg.arch == ArchitectureId::SegMamba) s->push(std::make_unique<GatedSpatialConv>(init, dims[i]));
      for (std::int64_t j = 0; j < depths[i]; ++j) {
        if (cfg.arch == ArchitectureId::LightUMamba)
          s->push(std::make_unique<MambaLayer>(init, dims[i], mo, alternating_order(mamba_index++)));
        else
          s->push(std::make_unique<VssLayer>(init, dims[i], mo));
      }
      enc_.push_back(add_module("enc" + std::to_string(i), std::move(s)));
      if (i + 1 < n)
        merge_.push_back(
            add_module("merge" + std::to_string(i), std::make_unique<PatchMerge>(init, dims[i], dims[i + 1], 2, true)));
    }
    up_.resize(n - 1);
    dec_.resize(n - 1);
    for (int i = static_cast<int>(n) - 2; i >= 0; --i) {
      up_[i] = add_module("up" + std::to_string(i), std::make_unique<ConvTranspose2d>(init, dims[i + 1], dims[i], 2, 2));
      dec_[i] = add_module("dec" + std::to_string(i), conv_stack(2 * dims[i], dims[i]));
    }
    final_up_ = add_module("final_up", std::make_unique<ConvTranspose2d>(init, dims[0], stem, P, P));
    final_dec_ = add_module("final_dec", conv_stack(2 * stem, stem));
    head_ = add_module("head", std::make_unique<Conv2d>(init, stem, cfg.num_classes, 1));
  }

  void zero_heads() override { zero_conv(*head_); }

 protected:
  Tensor run(const Tensor& x) override {
    Tensor s0 = stem_->forward(x);
    Tensor h = embed_norm_->forward(embed_->forward(x));
    std::vector<Tensor> skips;
    for (std::size_t i = 0; i < enc_.size(); ++i) {
      h = enc_[i]->forward(h);
      skips.push_back(h);
      if (i < merge_.size()) h = merge_[i]->forward(h);
    }
    for (int i = static_cast<int>(dec_.size()) - 1; i >= 0; --i)
      h = dec_[i]->forward(ops::concat({up_[i]->forward(h), skips[i]}, 1));
    h = final_dec_->forward(ops::concat({final_up_->forward(h), s0}, 1));
    return head_->forward(h);
  }

 private:
  Sequential* stem_;
  Conv2d* embed_;
  LayerNorm* embed_norm_;
  std::vector<Sequential*> enc_;
  std::vector<PatchMerge*> merge_;
  std::vector<ConvTranspose2d*> up_;
  std::vector<Sequential*> dec_;
  ConvTranspose2d* final_up_;
  Sequential* final_dec_;
  Conv2d* head_;
};

}  // namespace

std::unique_ptr<Model> build_plain_unet(const ModelConfig& cfg, ParamInit& init) {
  return std::make_unique<PlainUNet>(cfg, init);
}
std::unique_ptr<Model> build_unetr(const ModelConfig& cfg, ParamInit& init) { return std::make_unique<Unetr>(cfg, init); }
std::unique_ptr<Model> build_swin_unet(const ModelConfig& cfg, ParamInit& init) {
  return std::make_unique<SwinUNet>(cfg, init);
}
std::unique_ptr<Model> build_mamba_unet(const ModelConfig& cfg, ParamInit& init) {
  return std::make_unique<MambaUNet>(cfg, init);
}

}  // namespace nnuzoo::detail_models
