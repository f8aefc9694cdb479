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

#include "nnuzoo/train/loss.hpp"

#include <cmath>

#include "nnuzoo/error.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::train {

namespace {

constexpr std::uint16_t kIgnore = 65535;

struct Targets {
  Tensor one_hot;  // B×K×H×W, zero on ignored pixels
  Tensor mask;     // B×1×H×W
  std::vector<double> class_count;
  std::int64_t valid = 0;
};

Targets make_targets(const Tensor& x, std::span<const std::uint16_t> labels, const char* who) {
  if (x.rank() != 4) throw ShapeError(std::string(who) + ": expected B×K×H×W, got " + shape_str(x.shape()));
  const auto B = x.dim(0), K = x.dim(1), HW = x.dim(2) * x.dim(3);
  if (static_cast<std::int64_t>(labels.size()) != B * HW)
    throw ShapeError(std::string(who) + ": " + std::to_string(labels.size()) + " labels for " + shape_str(x.shape()));
  Targets t;
  std::vector<double> oh(static_cast<std::size_t>(B * K * HW), 0.0), m(static_cast<std::size_t>(B * HW), 0.0);
  t.class_count.assign(static_cast<std::size_t>(K), 0.0);
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t i = 0; i < HW; ++i) {
      const auto l = labels[static_cast<std::size_t>(b * HW + i)];
      if (l == kIgnore) continue;
      if (l >= K)
        throw ValueError(std::string(who) + ": label " + std::to_string(l) + " outside [0, " + std::to_string(K) + ")");
      oh[static_cast<std::size_t>((b * K + l) * HW + i)] = 1.0;
      m[static_cast<std::size_t>(b * HW + i)] = 1.0;
      t.class_count[l] += 1;
      ++t.valid;
    }
  t.one_hot = Tensor::from_vector(x.shape(), oh, x.dtype());
  t.mask = Tensor::from_vector({B, 1, x.dim(2), x.dim(3)}, m, x.dtype());
  return t;
}

Tensor dice_from_targets(const Tensor& probs, const Targets& t) {
  const auto K = probs.dim(1);
  const Tensor p = ops::mul(probs, t.mask);
  const Tensor inter = ops::sum(ops::mul(p, t.one_hot), {0, 2, 3});
  const Tensor psum = ops::sum(p, {0, 2, 3});
  const Tensor gsum = Tensor::from_vector({K}, t.class_count, probs.dtype());
  const Tensor num = ops::add_scalar(ops::mul_scalar(inter, 2.0), kDiceEps);
  const Tensor den = ops::add_scalar(ops::add(psum, gsum), kDiceEps);
  const Tensor ratio = ops::slice(ops::div(num, den), 0, 1, K);
  return ops::add_scalar(ops::neg(ops::mean(ratio)), 1.0);
}

Tensor ce_from_targets(const Tensor& logits, const Targets& t) {
  if (t.valid == 0) return ops::mul_scalar(ops::sum(logits), 0.0);
  const Tensor picked = ops::sum(ops::mul(ops::log_softmax(logits, 1), t.one_hot));
  return ops::mul_scalar(picked, -1.0 / static_cast<double>(t.valid));
}

}  // namespace

void LossWeights::validate() const {
  if (!(dice >= 0) || !(ce >= 0)) throw ValueError("loss weights must be non-negative");
  if (dice == 0 && ce == 0) throw ValueError("loss weights must not both be zero");
}

Tensor soft_dice_loss(const Tensor& probs, std::span<const std::uint16_t> labels) {
  const auto t = make_targets(probs, labels, "soft_dice_loss");
  if (probs.dim(1) < 2) throw ShapeError("soft_dice_loss: need at least 2 classes");
  return dice_from_targets(probs, t);
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::uint16_t> labels) {
  return ce_from_targets(logits, make_targets(logits, labels, "cross_entropy"));
}

Tensor segmentation_loss(const Tensor& logits, std::span<const std::uint16_t> labels, const LossWeights& w) {
  w.validate();
  const auto t = make_targets(logits, labels, "segmentation_loss");
  if (logits.dim(1) < 2) throw ShapeError("segmentation_loss: need at least 2 classes");
  Tensor total;
  if (w.dice > 0) total = ops::mul_scalar(dice_from_targets(ops::softmax(logits, 1), t), w.dice);
  if (w.ce > 0) {
    const Tensor ce = ops::mul_scalar(ce_from_targets(logits, t), w.ce);
    total = total.defined() ? ops::add(total, ce) : ce;
  }
  return total;
}

}  // namespace nnuzoo::train
