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

#include <array>
#include <vector>

#include "nnuzoo/blocks/layers.hpp"
#include "nnuzoo/kernels/attention.hpp"
#include "nnuzoo/kernels/patch.hpp"
#include "nnuzoo/kernels/ss2d.hpp"

namespace nnuzoo {

/// Largest head count ≤ max(1, channels / head_dim) that divides channels.
int heads_for(std::int64_t channels, std::int64_t head_dim);

/// Parameters of one scan direction. Δ bias starts at softplus⁻¹ of a
/// log-uniform draw in [1e-3, 1e-1], A = -(1..N) per row, D = 1.
class ScanProjectionModule : public Module {
 public:
  ScanProjectionModule(ParamInit& init, std::int64_t inner, std::int64_t dt_rank, std::int64_t state);
  kernels::ScanProjection p;
};

class Attention : public Module {
 public:
  Attention(ParamInit& init, std::int64_t dim, int heads);
  Tensor forward(const Tensor& x) override;  // B×L×C

  kernels::AttentionWeights w;
  int heads;
};

/// Pre-norm transformer encoder layer on B×L×C tokens.
class TransformerLayer : public Module {
 public:
  TransformerLayer(ParamInit& init, std::int64_t dim, int heads, double mlp_ratio);
  Tensor forward(const Tensor& x) override;

 private:
  LayerNorm* norm1_;
  Attention* attn_;
  LayerNorm* norm2_;
  Mlp* mlp_;
};

/// Swin layer on B×C×H×W maps: pre-norm window attention (optionally
/// shifted) and MLP. The window is clamped to the map size at run time; a
/// clamped window uses the central part of the bias table, and no shift is
/// applied when a single window covers the map.
class SwinLayer : public Module {
 public:
  SwinLayer(ParamInit& init, std::int64_t dim, int heads, int window, bool shifted, double mlp_ratio);
  Tensor forward(const Tensor& x) override;

 private:
  LayerNorm* norm1_;
  Attention* attn_;
  Tensor bias_table_;
  LayerNorm* norm2_;
  Mlp* mlp_;
  int window_;
  bool shifted_;
};

struct MambaOptions {
  std::int64_t state = 16;
  std::int64_t expand = 2;
  int conv_width = 3;
};

/// Visual state-space layer: channel norm, in-projection to [x, z], depthwise
/// 3×3 conv + SiLU, four-direction scan, norm, SiLU(z) gate, out-projection,
/// residual.
class VssLayer : public Module {
 public:
  VssLayer(ParamInit& init, std::int64_t dim, const MambaOptions& opt);
  Tensor forward(const Tensor& x) override;

 private:
  LayerNorm* norm_;
  Conv2d* in_proj_;
  Conv2d* dwconv_;
  std::array<ScanProjectionModule*, 4> dirs_;
  LayerNorm* out_norm_;
  Conv2d* out_proj_;
  std::int64_t inner_;
};

/// Mamba layer reading the map as one sequence in a fixed traversal order:
/// norm, in-projection, causal depthwise conv1d + SiLU, selective scan,
/// SiLU(z) gate, out-projection, residual.
class MambaLayer : public Module {
 public:
  MambaLayer(ParamInit& init, std::int64_t dim, const MambaOptions& opt, kernels::Traversal order);
  Tensor forward(const Tensor& x) override;
  kernels::Traversal order() const { return order_; }

 private:
  LayerNorm* norm_;
  Linear* in_proj_;
  Tensor conv_w_, conv_b_;
  ScanProjectionModule* scan_;
  Linear* out_proj_;
  std::int64_t inner_;
  int conv_width_;
  kernels::Traversal order_;
};

/// patch_merge (scale s, optional norm) as a module.
class PatchMerge : public Module {
 public:
  PatchMerge(ParamInit& init, std::int64_t in, std::int64_t out, int scale, bool normalize);
  Tensor forward(const Tensor& x) override;

 private:
  kernels::PatchProjection p_;
  int scale_;
};

class PatchExpand : public Module {
 public:
  PatchExpand(ParamInit& init, std::int64_t in, std::int64_t out, int scale, bool normalize);
  Tensor forward(const Tensor& x) override;

 private:
  kernels::PatchProjection p_;
  int scale_;
};


}  // namespace nnuzoo
