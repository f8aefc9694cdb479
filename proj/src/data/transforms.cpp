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

#include <algorithm>
#include <cmath>

#include "nnuzoo/data/dataset.hpp"

namespace nnuzoo::data {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by rejection.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return v % n;
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit(rng), u2 = unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Rebuilds a sample from C×H×W image values via an index map out(y, x) ← in(src(y, x)).
template <class Src>
SegmentationSample remap(const SegmentationSample& s, std::int64_t H2, std::int64_t W2, Src src) {
  const auto C = s.channels(), H = s.height(), W = s.width();
  const auto in = s.image.to_vector();
  std::vector<double> out(static_cast<std::size_t>(C * H2 * W2));
  LabelMap l{H2, W2, std::vector<std::uint16_t>(static_cast<std::size_t>(H2 * W2))};
  for (std::int64_t y = 0; y < H2; ++y)
    for (std::int64_t x = 0; x < W2; ++x) {
      const auto [sy, sx] = src(y, x);
      l.values[static_cast<std::size_t>(y * W2 + x)] = s.label.at(sy, sx);
      for (std::int64_t c = 0; c < C; ++c) out[(c * H2 + y) * W2 + x] = in[(c * H + sy) * W + sx];
    }
  SegmentationSample r;
  r.id = s.id;
  r.image = Tensor::from_vector({C, H2, W2}, out, s.image.dtype());
  r.label = std::move(l);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- synthetic

void SynthSpec::validate() const {
  if (height < 8 || width < 8) throw ValueError("SynthSpec: canvas must be at least 8×8");
  if (num_classes < 2) throw ValueError("SynthSpec: num_classes must be >= 2");
  if (num_classes > 1000) throw ValueError("SynthSpec: too many classes");
  if (channels < 1) throw ValueError("SynthSpec: channels must be >= 1");
  if (shapes_per_image < 1) throw ValueError("SynthSpec: shapes_per_image must be >= 1");
  if (!(noise_sigma >= 0)) throw ValueError("SynthSpec: noise_sigma must be >= 0");
}

SynthSpec preset_synth_spec(const std::string& preset) {
  struct P {
    const char* name;
    std::int64_t h, w, k, c;
  };
  static constexpr P kP[] = {{"Microscopy", 256, 256, 2, 3}, {"CAMUS", 256, 256, 3, 1},   {"ACDC", 256, 224, 4, 1},
                             {"AbdomenMR", 320, 320, 14, 1}, {"AbdomenCT", 256, 256, 14, 1}, {"PET", 320, 192, 23, 1},
                             {"SynthShapes", 64, 64, 3, 1}};
  for (const auto& p : kP)
    if (preset == p.name) {
      SynthSpec s;
      s.height = p.h;
      s.width = p.w;
      s.num_classes = p.k;
      s.channels = p.c;
      s.shapes_per_image = static_cast<int>(std::max<std::int64_t>(4, p.k - 1));
      return s;
    }
  throw ValueError("unknown preset '" + preset + "'");
}

Dataset generate_synthetic(const SynthSpec& spec, std::size_t count, std::uint64_t seed, const std::string& name) {
  spec.validate();
  if (count < 1) throw ValueError("generate_synthetic: count must be >= 1");
  std::mt19937_64 rng(seed);
  Dataset ds(name, spec.num_classes, "synthetic");
  const auto H = spec.height, W = spec.width, C = spec.channels;
  const double side = static_cast<double>(std::min(H, W));
  for (std::size_t n = 0; n < count; ++n) {
    LabelMap l{H, W, std::vector<std::uint16_t>(static_cast<std::size_t>(H * W), 0)};
    const auto offset = below(rng, static_cast<std::uint64_t>(spec.num_classes - 1));
    for (int j = 0; j < spec.shapes_per_image; ++j) {
      const auto k = static_cast<std::uint16_t>(1 + (offset + j) % static_cast<std::uint64_t>(spec.num_classes - 1));
      const bool ellipse = unit(rng) < 0.5;
      const double cy = unit(rng) * H, cx = unit(rng) * W;
      const double ry = (0.08 + 0.17 * unit(rng)) * side, rx = (0.08 + 0.17 * unit(rng)) * side;
      for (std::int64_t y = 0; y < H; ++y)
        for (std::int64_t x = 0; x < W; ++x) {
          const double dy = (y + 0.5 - cy) / ry, dx = (x + 0.5 - cx) / rx;
          const bool inside = ellipse ? dy * dy + dx * dx <= 1.0 : std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
          if (inside) l.values[static_cast<std::size_t>(y * W + x)] = k;
        }
    }
    std::vector<double> img(static_cast<std::size_t>(C * H * W));
    for (std::int64_t c = 0; c < C; ++c)
      for (std::int64_t i = 0; i < H * W; ++i) {
        const double base = spec.intensity_separation * l.values[static_cast<std::size_t>(i)];
        img[static_cast<std::size_t>(c * H * W + i)] = base + (spec.noise_sigma > 0 ? spec.noise_sigma * gaussian(rng) : 0.0);
      }
    SegmentationSample s;
    char id[32];
    std::snprintf(id, sizeof id, "case_%05zu", n);
    s.id = id;
    s.image = Tensor::from_vector({C, H, W}, img, DType::f32);
    s.label = std::move(l);
    ds.add(std::move(s));
  }
  return ds;
}

// ---------------------------------------------------------------- preprocess

SegmentationSample preprocess(const SegmentationSample& s, std::int64_t height, std::int64_t width) {
  if (s.image.numel() == 0) throw ValueError("preprocess: sample '" + s.id + "' has an empty image");
  if (height <= 0 || width <= 0 || height % 32 != 0 || width % 32 != 0)
    throw ValueError("preprocess: patch " + std::to_string(height) + "×" + std::to_string(width) +
                     " must be positive multiples of 32");
  const auto C = s.channels(), H = s.height(), W = s.width();
  auto v = s.image.to_vector();
  for (std::int64_t c = 0; c < C; ++c) {
    double* ch = v.data() + c * H * W;
    double mean = 0;
    for (std::int64_t i = 0; i < H * W; ++i) mean += ch[i];
    mean /= static_cast<double>(H * W);
    double var = 0;
    for (std::int64_t i = 0; i < H * W; ++i) var += (ch[i] - mean) * (ch[i] - mean);
    const double sd = std::max(std::sqrt(var / static_cast<double>(H * W)), 1e-8);
    for (std::int64_t i = 0; i < H * W; ++i) ch[i] = (ch[i] - mean) / sd;
  }
  // Offset of the output window in input coordinates (negative = padding).
  const auto oy = H >= height ? (H - height) / 2 : -((height - H) / 2);
  const auto ox = W >= width ? (W - width) / 2 : -((width - W) / 2);
  std::vector<double> out(static_cast<std::size_t>(C * height * width), 0.0);
  LabelMap l{height, width, std::vector<std::uint16_t>(static_cast<std::size_t>(height * width), kIgnoreLabel)};
  for (std::int64_t y = 0; y < height; ++y) {
    const auto sy = y + oy;
    if (sy < 0 || sy >= H) continue;
    for (std::int64_t x = 0; x < width; ++x) {
      const auto sx = x + ox;
      if (sx < 0 || sx >= W) continue;
      l.values[static_cast<std::size_t>(y * width + x)] = s.label.at(sy, sx);
      for (std::int64_t c = 0; c < C; ++c) out[(c * height + y) * width + x] = v[(c * H + sy) * W + sx];
    }
  }
  SegmentationSample r;
  r.id = s.id;
  r.image = Tensor::from_vector({C, height, width}, out, s.image.dtype());
  r.label = std::move(l);
  return r;
}

// ---------------------------------------------------------------- split

std::vector<std::size_t> permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[below(rng, i)]);
  return idx;
}

Split split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (n < 2) throw ValueError("split: need at least 2 samples, got " + std::to_string(n));
  if (!(ratio > 0 && ratio < 1)) throw ValueError("split: ratio must be in (0, 1)");
  std::mt19937_64 rng(seed);
  const auto idx = permutation(n, rng);
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return s;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double ratio, std::uint64_t seed) {
  const auto s = split_indices(ds.size(), ratio, seed);
  return {ds.subset(s.train), ds.subset(s.val)};
}

// ---------------------------------------------------------------- augment

SegmentationSample flip(const SegmentationSample& s, int axis) {
  const auto H = s.height(), W = s.width();
  if (axis == 0) return remap(s, H, W, [H](std::int64_t y, std::int64_t x) { return std::pair{H - 1 - y, x}; });
  if (axis == 1) return remap(s, H, W, [W](std::int64_t y, std::int64_t x) { return std::pair{y, W - 1 - x}; });
  throw ValueError("flip: axis must be 0 or 1");
}

SegmentationSample rot90(const SegmentationSample& s, int k) {
  k = ((k % 4) + 4) % 4;
  SegmentationSample r = s;
  for (int i = 0; i < k; ++i) {
    const auto W = r.width();
    // out(y, x) = in(x, W-1-y); output is W×H.
    r = remap(r, W, r.height(), [W](std::int64_t y, std::int64_t x) { return std::pair{x, W - 1 - y}; });
  }
  return r;
}

SegmentationSample augment(const SegmentationSample& s, std::mt19937_64& rng, const AugmentOptions& opt) {
  // A fixed number of draws per call keeps the stream aligned across samples.
  const double u_flip0 = unit(rng), u_flip1 = unit(rng), u_rot = unit(rng);
  const auto k_draw = below(rng, 3);
  SegmentationSample r = s;
  if (u_flip0 < opt.flip_prob) r = flip(r, 0);
  if (u_flip1 < opt.flip_prob) r = flip(r, 1);
  if (u_rot < opt.rotate_prob) r = rot90(r, r.height() == r.width() ? static_cast<int>(k_draw) + 1 : 2);
  return r;
}

}  // namespace nnuzoo::data
