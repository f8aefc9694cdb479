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

#include "models/builders.hpp"

namespace nnuzoo::detail_models {

namespace {

const char* kStageNames[11] = {"en1", "en2", "en3", "en4", "en5", "en6", "de5", "de4", "de3", "de2", "de1"};

Tensor up(const Tensor& x, int scale) {
  return scale == 1 ? x : ops::upsample2d(x, scale, ops::UpsampleMode::bilinear);
}

// Eleven U-Blocks in the nested U pattern: six encoder stages joined by 2×
// max pooling, five decoder stages fed by the upsampled deeper stage
// concatenated with the mirrored encoder output, six side heads and a
// per-class 1×1 fusion of the upsampled side logits.
class NestedModel : public Model {
 public:
  NestedModel(const ModelConfig& cfg, ParamInit& init) : Model(cfg) {
    for (int i = 0; i < 11; ++i) blocks_[i] = add_module(kStageNames[i], build_ublock(cfg.stages[i], init));
    // Side sources: De1, De2, De3, De4, De5, En6.
    for (int j = 0; j < 6; ++j) {
      const int stage = j < 5 ? 10 - j : 5;
      sides_heads_[j] = add_module("side" + std::to_string(j + 1),
                                   Conv2d::same(init, cfg.stages[stage].out_ch, cfg.num_classes, 3));
    }
    const auto K = cfg.num_classes;
    fuse_ = add_module("fuse", std::make_unique<Conv2d>(init, 6 * K, K, 1, ops::Conv2dOptions{1, 0, 1, static_cast<int>(K)}));
  }

  std::vector<const UBlock*> stages() const override { return {blocks_.begin(), blocks_.end()}; }

  void zero_heads() override {
    for (auto* h : sides_heads_) zero_conv(*h);
    zero_conv(*fuse_);
  }

 protected:
  Tensor run(const Tensor& x) override {
    std::array<Tensor, 6> e;
    e[0] = blocks_[0]->forward(x);
    for (int i = 1; i < 6; ++i) e[i] = blocks_[i]->forward(ops::max_pool2d(e[i - 1], 2, 2));
    std::array<Tensor, 5> d;  // d[k] = De(k+1)
    Tensor deeper = e[5];
    for (int i = 6; i < 11; ++i) {
      const int level = 10 - i;
      deeper = blocks_[i]->forward(ops::concat({up(deeper, 2), e[level]}, 1));
      d[level] = deeper;
    }
    std::vector<Tensor> side_logits;
    for (int j = 0; j < 6; ++j) {
      const Tensor& src = j < 5 ? d[j] : e[5];
      side_logits.push_back(up(sides_heads_[j]->forward(src), 1 << j));
    }
    sides_ = side_logits;
    // Group channels by class so each class fuses its own six side logits.
    const auto B = x.dim(0), K = side_logits[0].dim(1), H = x.dim(2), W = x.dim(3);
    Tensor stacked = ops::reshape(ops::concat(std::span<const Tensor>(side_logits), 1), {B, 6, K, H, W});
    stacked = ops::reshape(ops::permute(stacked, {0, 2, 1, 3, 4}), {B, 6 * K, H, W});
    return fuse_->forward(stacked);
  }

 private:
  std::array<UBlock*, 11> blocks_{};
  std::array<Conv2d*, 6> sides_heads_{};
  Conv2d* fuse_;
};

}  // namespace

void zero_conv(Conv2d& c) {
  if (c.weight.is_meta()) return;
  c.weight.copy_from(Tensor::zeros(c.weight.shape(), c.weight.dtype()));
  if (c.bias.defined()) c.bias.copy_from(Tensor::zeros(c.bias.shape(), c.bias.dtype()));
}

std::unique_ptr<Model> build_nested(const ModelConfig& cfg, ParamInit& init) {
  return std::make_unique<NestedModel>(cfg, init);
}

}  // namespace nnuzoo::detail_models
