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

#include <cstdint>
#include <span>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::train {

inline constexpr double kDiceEps = 1e-5;

/// 1 − mean over foreground classes of (2·Σp·g + ε)/(Σp + Σg + ε), sums taken
/// over the whole batch and every non-ignored pixel. probs B×K×H×W, labels
/// B·H·W row-major with 65535 as the ignore value.
Tensor soft_dice_loss(const Tensor& probs, std::span<const std::uint16_t> labels);

/// Mean of −log softmax(logits)[label] over non-ignored pixels; 0 when every
/// pixel is ignored. Throws ValueError for a label ≥ K.
Tensor cross_entropy(const Tensor& logits, std::span<const std::uint16_t> labels);

struct LossWeights {
  double dice = 1.0;
  double ce = 1.0;

  void validate() const;
};

/// w_dice·soft_dice(softmax(logits)) + w_ce·cross_entropy(logits).
Tensor segmentation_loss(const Tensor& logits, std::span<const std::uint16_t> labels, const LossWeights& w = {});

}  // namespace nnuzoo::train
