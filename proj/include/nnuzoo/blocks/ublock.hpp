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

#include <memory>
#include <string>
#include <vector>

#include "nnuzoo/blocks/kernel_layers.hpp"
#include "nnuzoo/tensor/primitive.hpp"

namespace nnuzoo {

enum class BlockKind { RSU, RSU_F, UNETR_B, SWT_B, SS2D_B, ALT1DM_B, MAMBAND_B };

std::string block_kind_name(BlockKind k);
BlockKind block_kind_from_name(const std::string& name);

/// Construction recipe of one U-Block.
///
/// Recognized attrs (defaults in parentheses):
///   layers (2)       kernel layers per level, encoder and decoder
///   head_dim (32)    SWT_B / UNETR_B channels per attention head
///   window (8)       SWT_B window size
///   mlp_ratio (4.0)  SWT_B / UNETR_B
///   state (16), expand (2), conv_width (3)   Mamba kinds
///   embed (4·mid)    UNETR_B token width
struct UBlockSpec {
  BlockKind kind = BlockKind::RSU;
  std::int64_t in_ch = 1, mid_ch = 1, out_ch = 1;
  int depth = 1;
  std::vector<int> scale_schedule;
  Attrs attrs;
  int traversal_seed = 0;

  void validate() const;
  /// Product of the schedule: the input H and W must be divisible by it.
  std::int64_t downsample_factor() const;
};

/// Default schedule for a kind at a given depth: RSU [1, 2, …, 2, 1],
/// RSU_F all 1, the others all 2.
std::vector<int> default_schedule(BlockKind kind, int depth);

class UBlock : public Module {
 public:
  explicit UBlock(UBlockSpec spec) : spec_(std::move(spec)) {}
  const UBlockSpec& spec() const { return spec_; }
  BlockKind kind() const { return spec_.kind; }
  /// Traversal order of every Mamba layer, in construction order (empty for
  /// kinds without 1D scans).
  virtual std::vector<kernels::Traversal> traversals() const { return {}; }

 protected:
  void check_input(const Tensor& x) const;

 private:
  UBlockSpec spec_;
};

std::unique_ptr<UBlock> build_ublock(const UBlockSpec& spec, ParamInit& init);

/// Traversal order that ALT1DM_B block number `index` uses.
kernels::Traversal alternating_order(int index);
/// Traversal order of layer `layer` in a MAMBAND_B block seeded with `seed`.
kernels::Traversal nd_order(int seed, int layer);

/// Fixed 2D sine/cosine position code for an h×w token grid, shape 1×(h·w)×D.
/// Half of the channels encode the row, half the column.
Tensor sinusoid_position_2d(std::int64_t h, std::int64_t w, std::int64_t D, DType dtype);

}  // namespace nnuzoo
