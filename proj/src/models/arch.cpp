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

#include "nnuzoo/models/arch.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "nnuzoo/error.hpp"

namespace nnuzoo {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Columns: Microscopy, CAMUS, ACDC, AbdomenMR, AbdomenCT, PET.
using Row = std::array<double, 6>;
const Row& target_row(ArchitectureId a) {
  static const Row rows[] = {
      {62.2, 62.2, 28.7, 45.4, 45.4, 45.5},        // nnUNet-like
      {110.7, 110.3, 110.3, 110.4, 110.3, 110.3},  // UNETR
      {39.5, 39.5, 39.5, 39.5, 39.5, 39.5},        // SwT
      {26.2, 26.2, 26.2, 26.2, 26.2, 26.2},        // SwinUMamba
      {25.3, 25.3, 25.3, 25.3, 25.3, 25.3},        // SegMamba
      {5.70, 5.70, 5.70, 5.70, 5.70, 5.70},        // LightUMamba
      {42.0, 42.0, 42.0, 42.1, 42.1, 42.3},        // U2Net
      {1.10, 1.10, 1.10, 1.10, 1.10, 1.20},        // U2NetS
      {149.1, 149.1, 149.0, 149.3, 149.1, 149.1},  // UNETR2Net
      {172.2, 172.2, 172.2, 172.3, 172.3, 172.3},  // SwT2Net
      {39.0, 39.1, 39.1, 39.2, 39.2, 39.3},        // SS2D2Net
      {2.00, 2.00, 2.00, 2.10, 2.10, 2.20},        // SS2D2NetS
      {8.90, 8.90, 8.90, 8.90, 8.90, 8.90},        // Alt1DM2Net
      {1.50, 1.50, 1.50, 1.50, 1.50, 1.50},        // Alt1DM2NetS
      {39.5, 39.5, 39.5, 39.5, 39.5, 39.5},        // MambaND2Net
  };
  return rows[static_cast<int>(a)];
}

}  // namespace

std::string arch_name(ArchitectureId arch) {
  switch (arch) {
    case ArchitectureId::nnUNetLike: return "nnUNet-like";
    case ArchitectureId::UNETR: return "UNETR";
    case ArchitectureId::SwT: return "SwT";
    case ArchitectureId::SwinUMamba: return "SwinUMamba";
    case ArchitectureId::SegMamba: return "SegMamba";
    case ArchitectureId::LightUMamba: return "LightUMamba";
    case ArchitectureId::U2Net: return "U2Net";
    case ArchitectureId::U2NetS: return "U2NetS";
    case ArchitectureId::UNETR2Net: return "UNETR2Net";
    case ArchitectureId::SwT2Net: return "SwT2Net";
    case ArchitectureId::SS2D2Net: return "SS2D2Net";
    case ArchitectureId::SS2D2NetS: return "SS2D2NetS";
    case ArchitectureId::Alt1DM2Net: return "Alt1DM2Net";
    case ArchitectureId::Alt1DM2NetS: return "Alt1DM2NetS";
    case ArchitectureId::MambaND2Net: return "MambaND2Net";
  }
  return "?";
}

ArchitectureId arch_from_name(const std::string& name) {
  const auto key = lower(name);
  if (key == "nnunet") return ArchitectureId::nnUNetLike;
  for (auto a : all_architectures())
    if (lower(arch_name(a)) == key) return a;
  throw ValueError("unknown architecture '" + name + "'");
}

const std::vector<ArchitectureId>& all_architectures() {
  static const std::vector<ArchitectureId> all = {
      ArchitectureId::nnUNetLike, ArchitectureId::UNETR,      ArchitectureId::SwT,
      ArchitectureId::SwinUMamba, ArchitectureId::SegMamba,   ArchitectureId::LightUMamba,
      ArchitectureId::U2Net,      ArchitectureId::U2NetS,     ArchitectureId::UNETR2Net,
      ArchitectureId::SwT2Net,    ArchitectureId::SS2D2Net,   ArchitectureId::SS2D2NetS,
      ArchitectureId::Alt1DM2Net, ArchitectureId::Alt1DM2NetS, ArchitectureId::MambaND2Net};
  return all;
}

bool is_nested(ArchitectureId arch) { return static_cast<int>(arch) >= static_cast<int>(ArchitectureId::U2Net); }

bool is_small(ArchitectureId arch) {
  return arch == ArchitectureId::U2NetS || arch == ArchitectureId::SS2D2NetS || arch == ArchitectureId::Alt1DM2NetS;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"Microscopy", "CAMUS", "ACDC", "AbdomenMR",
                                                 "AbdomenCT",  "PET",   "SynthShapes"};
  return names;
}

std::optional<double> target_params_millions(ArchitectureId arch, const std::string& preset) {
  const auto& names = preset_names();
  const auto it = std::find(names.begin(), names.end(), preset);
  if (it == names.end()) throw ValueError("unknown preset '" + preset + "'");
  const auto col = static_cast<std::size_t>(it - names.begin());
  if (col >= 6) return std::nullopt;
  return target_row(arch)[col];
}

}  // namespace nnuzoo
