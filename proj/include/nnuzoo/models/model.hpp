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
#include <vector>

#include "nnuzoo/blocks/ublock.hpp"
#include "nnuzoo/models/config.hpp"

namespace nnuzoo {

/// A segmentation network mapping B×in×H×W images to B×K×H×W logits.
class Model : public Module {
 public:
  explicit Model(ModelConfig cfg) : cfg_(std::move(cfg)) {}

  const ModelConfig& config() const { return cfg_; }

  /// Fused logits. Throws ShapeError when the batch geometry differs from the config.
  Tensor forward(const Tensor& x) final;

  /// Per-stage logits of the last forward, upsampled to full resolution
  /// (nested architectures only; empty otherwise).
  const std::vector<Tensor>& side_outputs() const { return sides_; }

  /// Stage blocks in order En1..En6, De5..De1 (nested architectures only).
  virtual std::vector<const UBlock*> stages() const { return {}; }

  /// Sets every output-head weight and bias to zero.
  virtual void zero_heads() = 0;

 protected:
  virtual Tensor run(const Tensor& x) = 0;
  std::vector<Tensor> sides_;

 private:
  ModelConfig cfg_;
};

/// Validates the config and builds the network. With allocate=false every
/// parameter is shape-only, which is enough for counting.
std::unique_ptr<Model> build_model(const ModelConfig& cfg, bool allocate = true);
/// Same, checking that `arch` agrees with the config.
std::unique_ptr<Model> build_model(ArchitectureId arch, const ModelConfig& cfg, bool allocate = true);

std::int64_t count_params(const Model& model);
/// Counts without allocating weights.
std::int64_t count_params(const ModelConfig& cfg);

}  // namespace nnuzoo
