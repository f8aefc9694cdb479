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

#include "models/presets.hpp"

#include <algorithm>
#include <cmath>

#include "nnuzoo/error.hpp"

// Widths below were chosen with tools/calibrate so that count_params lands
// near the target table at width_mult 1.

namespace nnuzoo::presets {

namespace {

using Ints = std::vector<std::int64_t>;

// Isotropic halvings while both sides stay even and at least 8.
int plain_unet_stages(std::int64_t h, std::int64_t w) {
  int n = 1;
  while (n < 7 && h % 2 == 0 && w % 2 == 0 && h >= 8 && w >= 8) {
    h /= 2;
    w /= 2;
    ++n;
  }
  return n;
}

Attrs plain_unet(const std::string& preset, std::int64_t h, std::int64_t w) {
  std::int64_t max_features = 512, convs = 2;
  if (preset == "Microscopy" || preset == "CAMUS") {
    max_features = 640;
    convs = 3;
  } else if (preset == "ACDC" || preset == "AbdomenMR" || preset == "AbdomenCT") {
    convs = 3;
  } else if (preset == "PET") {
    max_features = 640;
    convs = 4;
  }
  Ints features;
  const int n = plain_unet_stages(h, w);
  for (int i = 0; i < n; ++i) features.push_back(std::min<std::int64_t>(32 << i, max_features));
  return Attrs{{"features", features}, {"convs", convs}};
}

std::int64_t scale_to(std::int64_t c, double m, std::int64_t multiple = 1) {
  const auto v = static_cast<std::int64_t>(std::llround(static_cast<double>(c) * m / multiple)) * multiple;
  return std::max(v, multiple);
}

void scale_list(Attrs& a, const char* key, double m) {
  if (!a.has(key)) return;
  auto v = a.get_ints(key);
  for (auto& c : v) c = scale_to(c, m);
  a.set(key, v);
}

}  // namespace

Attrs calibrated_attrs(ArchitectureId arch, const std::string& preset, std::int64_t height, std::int64_t width) {
  switch (arch) {
    case ArchitectureId::nnUNetLike: return plain_unet(preset, height, width);
    case ArchitectureId::UNETR:
      return Attrs{{"patch", std::int64_t{16}}, {"hidden", std::int64_t{768}},   {"layers", std::int64_t{12}},
                   {"heads", std::int64_t{12}}, {"mlp_dim", std::int64_t{3072}}, {"feature_size", std::int64_t{80}}};
    case ArchitectureId::SwT:
      return Attrs{{"patch", std::int64_t{4}},        {"embed", std::int64_t{114}},   {"depths", Ints{2, 2, 2, 2}},
                   {"depths_dec", Ints{2, 2, 2}},     {"heads_base", std::int64_t{3}}, {"window", std::int64_t{8}},
                   {"mlp_ratio", 4.0}};
    case ArchitectureId::SwinUMamba:
      return Attrs{{"patch", std::int64_t{4}}, {"stem", std::int64_t{48}}, {"dims", Ints{96, 192, 384, 768}},
                   {"depths", Ints{2, 2, 7, 2}}, {"state", std::int64_t{16}}, {"expand", std::int64_t{2}},
                   {"dec_convs", std::int64_t{2}}};
    case ArchitectureId::SegMamba:
      return Attrs{{"patch", std::int64_t{2}}, {"stem", std::int64_t{48}}, {"dims", Ints{96, 192, 384, 768}},
                   {"depths", Ints{2, 2, 2, 1}}, {"state", std::int64_t{16}}, {"expand", std::int64_t{2}},
                   {"dec_convs", std::int64_t{2}}};
    case ArchitectureId::LightUMamba:
      return Attrs{{"patch", std::int64_t{2}}, {"stem", std::int64_t{32}}, {"dims", Ints{56, 112, 224, 448}},
                   {"depths", Ints{1, 2, 2, 2}}, {"state", std::int64_t{16}}, {"expand", std::int64_t{2}},
                   {"dec_convs", std::int64_t{1}}};
    case ArchitectureId::U2Net:
    case ArchitectureId::U2NetS: return Attrs{};
    case ArchitectureId::UNETR2Net:
      return Attrs{{"layers", std::int64_t{2}}, {"head_dim", std::int64_t{64}}, {"mlp_ratio", 4.0},
                   {"embed_ratio", 4.2}};
    case ArchitectureId::SwT2Net:
      return Attrs{{"layers", std::int64_t{5}}, {"head_dim", std::int64_t{32}}, {"window", std::int64_t{8}},
                   {"mlp_ratio", 10.0}};
    case ArchitectureId::SS2D2Net:
      return Attrs{{"layers", std::int64_t{1}}, {"state", std::int64_t{16}}, {"expand", std::int64_t{1}},
                   {"plan_scale", 0.97}};
    case ArchitectureId::SS2D2NetS:
      return Attrs{{"layers", std::int64_t{1}}, {"state", std::int64_t{12}}, {"expand", std::int64_t{1}},
                   {"plan_scale", 0.85}};
    case ArchitectureId::Alt1DM2Net:
      return Attrs{{"layers", std::int64_t{1}}, {"state", std::int64_t{16}}, {"expand", std::int64_t{2}},
                   {"plan_scale", 0.4}};
    case ArchitectureId::Alt1DM2NetS:
      return Attrs{{"layers", std::int64_t{1}}, {"state", std::int64_t{8}}, {"expand", std::int64_t{2}},
                   {"plan_scale", 0.5}};
    case ArchitectureId::MambaND2Net:
      return Attrs{{"layers", std::int64_t{4}}, {"state", std::int64_t{16}}, {"expand", std::int64_t{2}}};
  }
  throw ValueError("unknown architecture");
}

void scale_baseline_attrs(ArchitectureId arch, Attrs& a, double m) {
  if (m == 1.0) return;
  switch (arch) {
    case ArchitectureId::nnUNetLike: scale_list(a, "features", m); break;
    case ArchitectureId::UNETR: {
      const auto heads = a.get_int("heads");
      a.set("hidden", scale_to(a.get_int("hidden"), m, heads));
      a.set("mlp_dim", scale_to(a.get_int("mlp_dim"), m));
      a.set("feature_size", scale_to(a.get_int("feature_size"), m));
      break;
    }
    case ArchitectureId::SwT: a.set("embed", scale_to(a.get_int("embed"), m, a.get_int("heads_base"))); break;
    case ArchitectureId::SwinUMamba:
    case ArchitectureId::SegMamba:
    case ArchitectureId::LightUMamba:
      scale_list(a, "dims", m);
      a.set("stem", scale_to(a.get_int("stem"), m));
      break;
    default: break;
  }
}

std::int64_t baseline_downsample_factor(ArchitectureId arch, const Attrs& a) {
  switch (arch) {
    case ArchitectureId::nnUNetLike: return std::int64_t{1} << (a.get_ints("features").size() - 1);
    case ArchitectureId::UNETR: return a.get_int("patch");
    case ArchitectureId::SwT: return a.get_int("patch") << (a.get_ints("depths").size() - 1);
    case ArchitectureId::SwinUMamba:
    case ArchitectureId::SegMamba:
    case ArchitectureId::LightUMamba: return a.get_int("patch") << (a.get_ints("dims").size() - 1);
    default: return 1;
  }
}

}  // namespace nnuzoo::presets
