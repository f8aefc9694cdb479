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
#include <memory>

#include "nnuzoo/blocks/kernel_layers.hpp"
#include "nnuzoo/models/model.hpp"

namespace nnuzoo::detail_models {

void zero_conv(Conv2d& c);

std::unique_ptr<Model> build_nested(const ModelConfig& cfg, ParamInit& init);
std::unique_ptr<Model> build_plain_unet(const ModelConfig& cfg, ParamInit& init);
std::unique_ptr<Model> build_unetr(const ModelConfig& cfg, ParamInit& init);
std::unique_ptr<Model> build_swin_unet(const ModelConfig& cfg, ParamInit& init);
/// SwinUMamba, SegMamba and LightUMamba: state-space encoder, convolutional decoder.
std::unique_ptr<Model> build_mamba_unet(const ModelConfig& cfg, ParamInit& init);

}  // namespace nnuzoo::detail_models
