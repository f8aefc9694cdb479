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

#include "nnuzoo/models/config.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "models/presets.hpp"

namespace nnuzoo {

using nlohmann::json;

namespace {

struct PresetGeometry {
  const char* name;
  std::int64_t height, width, classes, batch, in_channels;
};

constexpr PresetGeometry kPresets[] = {
    {"Microscopy", 256, 256, 2, 8, 3}, {"CAMUS", 256, 256, 3, 6, 1},     {"ACDC", 256, 224, 4, 16, 1},
    {"AbdomenMR", 320, 320, 14, 8, 1}, {"AbdomenCT", 256, 256, 14, 6, 1}, {"PET", 320, 192, 23, 4, 1},
    {"SynthShapes", 64, 64, 3, 8, 1},
};

const PresetGeometry& geometry(const std::string& preset) {
  for (const auto& p : kPresets)
    if (preset == p.name) return p;
  throw ValueError("unknown preset '" + preset + "'");
}

std::int64_t scaled(std::int64_t c, double mult, std::int64_t multiple = 1) {
  const auto v = static_cast<std::int64_t>(std::llround(static_cast<double>(c) * mult / multiple)) * multiple;
  return std::max(v, multiple);
}

json attrs_to_json(const Attrs& a) {
  json j = json::object();
  for (const auto& [k, v] : a.values())
    std::visit([&, key = k](const auto& x) { j[key] = x; }, v);
  return j;
}

Attrs attrs_from_json(const json& j) {
  Attrs a;
  for (const auto& [k, v] : j.items()) {
    if (v.is_boolean()) a.set(k, v.get<bool>());
    else if (v.is_number_integer()) a.set(k, v.get<std::int64_t>());
    else if (v.is_number_float()) a.set(k, v.get<double>());
    else if (v.is_array()) a.set(k, v.get<std::vector<std::int64_t>>());
    else throw DataError("config attr '" + k + "' has unsupported type");
  }
  return a;
}

json spec_to_json(const UBlockSpec& s) {
  return json{{"kind", block_kind_name(s.kind)}, {"in", s.in_ch},       {"mid", s.mid_ch},
              {"out", s.out_ch},                 {"depth", s.depth},    {"schedule", s.scale_schedule},
              {"attrs", attrs_to_json(s.attrs)}, {"traversal_seed", s.traversal_seed}};
}

UBlockSpec spec_from_json(const json& j) {
  UBlockSpec s;
  s.kind = block_kind_from_name(j.at("kind").get<std::string>());
  s.in_ch = j.at("in").get<std::int64_t>();
  s.mid_ch = j.at("mid").get<std::int64_t>();
  s.out_ch = j.at("out").get<std::int64_t>();
  s.depth = j.at("depth").get<int>();
  s.scale_schedule = j.at("schedule").get<std::vector<int>>();
  s.attrs = attrs_from_json(j.at("attrs"));
  s.traversal_seed = j.at("traversal_seed").get<int>();
  return s;
}

// One row of the nested channel plan before scaling.
struct StageRow {
  std::int64_t mid, out;
  int rsu_depth;
  bool deep;  // En5, En6, De5
};

// En1..En6, De5..De1 of the full and the small plan.
constexpr StageRow kFullPlan[11] = {{32, 64, 7, false},   {32, 128, 6, false}, {64, 256, 5, false},
                                    {128, 512, 4, false}, {256, 512, 4, true}, {256, 512, 4, true},
                                    {256, 512, 4, true},  {128, 256, 4, false}, {64, 128, 5, false},
                                    {32, 64, 6, false},   {16, 64, 7, false}};
constexpr StageRow kSmallPlan[11] = {{16, 64, 7, false}, {16, 64, 6, false}, {16, 64, 5, false}, {16, 64, 4, false},
                                     {16, 64, 4, true},  {16, 64, 4, true},  {16, 64, 4, true},  {16, 64, 4, false},
                                     {16, 64, 5, false}, {16, 64, 6, false}, {16, 64, 7, false}};

// Resolution level (power of two) of each stage.
constexpr int kStageLevel[11] = {0, 1, 2, 3, 4, 5, 4, 3, 2, 1, 0};

BlockKind named_kind(ArchitectureId a) {
  switch (a) {
    case ArchitectureId::UNETR2Net: return BlockKind::UNETR_B;
    case ArchitectureId::SwT2Net: return BlockKind::SWT_B;
    case ArchitectureId::SS2D2Net:
    case ArchitectureId::SS2D2NetS: return BlockKind::SS2D_B;
    case ArchitectureId::Alt1DM2Net:
    case ArchitectureId::Alt1DM2NetS: return BlockKind::ALT1DM_B;
    case ArchitectureId::MambaND2Net: return BlockKind::MAMBAND_B;
    default: return BlockKind::RSU;
  }
}

bool fully_named(ArchitectureId a) { return a == ArchitectureId::UNETR2Net || a == ArchitectureId::MambaND2Net; }

// Attrs forwarded to kernel stages.
constexpr const char* kBlockAttrKeys[] = {"layers", "head_dim", "window", "mlp_ratio", "state", "expand", "conv_width"};

}  // namespace

void rebuild_stage_plan(ModelConfig& cfg) {
  cfg.stages.clear();
  if (!is_nested(cfg.arch)) return;
  const auto& plan = is_small(cfg.arch) ? kSmallPlan : kFullPlan;
  const double mult = cfg.width_mult * cfg.attrs.get_double("plan_scale", 1.0);
  const BlockKind named = named_kind(cfg.arch);
  std::int64_t outs[11] = {};
  for (int i = 0; i < 11; ++i) {
    const auto& row = plan[i];
    UBlockSpec s;
    s.mid_ch = scaled(row.mid, mult);
    s.out_ch = scaled(row.out, mult);
    outs[i] = s.out_ch;
    if (i == 0) s.in_ch = cfg.in_channels;
    else if (i <= 5) s.in_ch = outs[i - 1];
    else s.in_ch = outs[i - 1] + outs[10 - i];  // previous decoder + mirrored encoder
    const bool kernel_stage = named != BlockKind::RSU && (!row.deep || fully_named(cfg.arch));
    if (!kernel_stage) {
      s.kind = row.deep ? BlockKind::RSU_F : BlockKind::RSU;
      s.depth = row.rsu_depth;
    } else {
      s.kind = named;
      s.depth = row.deep ? 1 : 4 - kStageLevel[i];
      s.traversal_seed = i;
      for (const char* key : kBlockAttrKeys)
        if (cfg.attrs.has(key)) s.attrs.set(key, cfg.attrs.values().at(key));
      if (named == BlockKind::UNETR_B)
        s.attrs.set("embed", scaled(s.mid_ch, cfg.attrs.get_double("embed_ratio", 4.0), 4));
    }
    s.scale_schedule = default_schedule(s.kind, s.depth);
    if (row.deep && s.kind != BlockKind::RSU_F && s.kind != BlockKind::UNETR_B) s.scale_schedule = {1};
    cfg.stages.push_back(std::move(s));
  }
}

std::int64_t ModelConfig::downsample_factor() const {
  if (is_nested(arch)) {
    std::int64_t f = 32;
    for (std::size_t i = 0; i < stages.size() && i < 11; ++i)
      if (stages[i].kind != BlockKind::UNETR_B)
        f = std::max(f, (std::int64_t{1} << kStageLevel[i]) * stages[i].downsample_factor());
    return f;
  }
  return presets::baseline_downsample_factor(arch, attrs);
}

void ModelConfig::validate() const {
  if (num_classes < 2) throw ValueError("ModelConfig: num_classes must be >= 2");
  if (in_channels < 1) throw ValueError("ModelConfig: in_channels must be >= 1");
  if (height < 1 || width < 1) throw ValueError("ModelConfig: height and width must be positive");
  if (!(width_mult > 0)) throw ValueError("ModelConfig: width_mult must be positive");
  if (is_nested(arch)) {
    if (stages.size() != 11) throw ValueError("ModelConfig: nested architectures need 11 stage specs");
    for (const auto& s : stages) s.validate();
    if (stages.front().in_ch != in_channels) throw ValueError("ModelConfig: En1 input channels differ from in_channels");
  }
  const auto f = downsample_factor();
  if (height % f != 0 || width % f != 0)
    throw ShapeError("ModelConfig: " + arch_name(arch) + " needs H and W divisible by " + std::to_string(f) + ", got " +
                     std::to_string(height) + "×" + std::to_string(width));
}

std::string config_to_json(const ModelConfig& c) {
  json stages = json::array();
  for (const auto& s : c.stages) stages.push_back(spec_to_json(s));
  json j{{"arch", arch_name(c.arch)},  {"preset", c.preset},         {"in_channels", c.in_channels},
         {"num_classes", c.num_classes}, {"height", c.height},      {"width", c.width},
         {"batch_size", c.batch_size},   {"width_mult", c.width_mult}, {"seed", c.seed},
         {"attrs", attrs_to_json(c.attrs)}, {"stages", stages}};
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ModelConfig c;
    c.arch = arch_from_name(j.at("arch").get<std::string>());
    c.preset = j.at("preset").get<std::string>();
    c.in_channels = j.at("in_channels").get<std::int64_t>();
    c.num_classes = j.at("num_classes").get<std::int64_t>();
    c.height = j.at("height").get<std::int64_t>();
    c.width = j.at("width").get<std::int64_t>();
    c.batch_size = j.at("batch_size").get<std::int64_t>();
    c.width_mult = j.at("width_mult").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.attrs = attrs_from_json(j.at("attrs"));
    for (const auto& s : j.at("stages")) c.stages.push_back(spec_from_json(s));
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model config: ") + e.what());
  }
}

ModelConfig preset_config(ArchitectureId arch, const std::string& preset, double width_mult) {
  const auto& g = geometry(preset);
  ModelConfig c;
  c.arch = arch;
  c.preset = preset;
  c.in_channels = g.in_channels;
  c.num_classes = g.classes;
  c.height = g.height;
  c.width = g.width;
  c.batch_size = g.batch;
  c.width_mult = width_mult;
  c.attrs = presets::calibrated_attrs(arch, preset, g.height, g.width);
  if (is_nested(arch)) rebuild_stage_plan(c);
  else presets::scale_baseline_attrs(arch, c.attrs, width_mult);
  return c;
}

ModelConfig tiny_config(ArchitectureId arch) { return preset_config(arch, "SynthShapes", kTinyWidth); }

}  // namespace nnuzoo
