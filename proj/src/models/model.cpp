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

#include "nnuzoo/models/model.hpp"

#include "models/builders.hpp"

namespace nnuzoo {

Tensor Model::forward(const Tensor& x) {
  if (x.rank() != 4 || x.dim(1) != cfg_.in_channels || x.dim(2) != cfg_.height || x.dim(3) != cfg_.width)
    throw ShapeError(arch_name(cfg_.arch) + ": expected B×" + std::to_string(cfg_.in_channels) + "×" +
                     std::to_string(cfg_.height) + "×" + std::to_string(cfg_.width) + " input, got " +
                     shape_str(x.shape()));
  sides_.clear();
  return run(x);
}

std::unique_ptr<Model> build_model(const ModelConfig& cfg, bool allocate) {
  cfg.validate();
  ParamInit init(cfg.seed, DType::f32, allocate);
  switch (cfg.arch) {
    case ArchitectureId::nnUNetLike: return detail_models::build_plain_unet(cfg, init);
    case ArchitectureId::UNETR: return detail_models::build_unetr(cfg, init);
    case ArchitectureId::SwT: return detail_models::build_swin_unet(cfg, init);
    case ArchitectureId::SwinUMamba:
    case ArchitectureId::SegMamba:
    case ArchitectureId::LightUMamba: return detail_models::build_mamba_unet(cfg, init);
    default: return detail_models::build_nested(cfg, init);
  }
}

std::unique_ptr<Model> build_model(ArchitectureId arch, const ModelConfig& cfg, bool allocate) {
  if (arch != cfg.arch)
    throw ValueError("build_model: config is for " + arch_name(cfg.arch) + ", requested " + arch_name(arch));
  return build_model(cfg, allocate);
}

std::int64_t count_params(const Model& model) { return model.count_params(); }

std::int64_t count_params(const ModelConfig& cfg) { return build_model(cfg, false)->count_params(); }

}  // namespace nnuzoo
