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
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::data {

/// Label value excluded from losses and metrics (padding).
inline constexpr std::uint16_t kIgnoreLabel = 65535;

struct LabelMap {
  std::int64_t height = 0, width = 0;
  std::vector<std::uint16_t> values;  // row-major

  std::uint16_t at(std::int64_t y, std::int64_t x) const { return values[static_cast<std::size_t>(y * width + x)]; }
};

struct SegmentationSample {
  std::string id;
  Tensor image;  // C×H×W
  LabelMap label;

  std::int64_t channels() const { return image.dim(0); }
  std::int64_t height() const { return image.dim(1); }
  std::int64_t width() const { return image.dim(2); }
};

/// Ordered samples with a class count. Samples are either held in memory or
/// read from NZT1 files on access.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::int64_t num_classes, std::string modality = "synthetic");

  const std::string& name() const { return name_; }
  std::int64_t num_classes() const { return num_classes_; }
  const std::string& modality() const { return modality_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(SegmentationSample s);
  void add_lazy(std::string id, std::function<SegmentationSample()> loader);
  SegmentationSample at(std::size_t i) const;
  const std::string& id(std::size_t i) const { return entries_.at(i).id; }

  /// Samples at `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  /// Applies `fn` to every sample and keeps the results in memory.
  Dataset map(const std::function<SegmentationSample(const SegmentationSample&)>& fn) const;

 private:
  struct Entry {
    std::string id;
    std::shared_ptr<const SegmentationSample> sample;
    std::function<SegmentationSample()> loader;
  };
  std::string name_;
  std::int64_t num_classes_ = 2;
  std::string modality_;
  std::vector<Entry> entries_;
};

// ---- NZT1 files: "NZT1" | u8 dtype (0 f32, 1 f64, 2 u16) | u8 rank | u32 dims | LE data

void write_image_nzt(const std::string& path, const Tensor& image);
Tensor read_image_nzt(const std::string& path);
void write_label_nzt(const std::string& path, const LabelMap& label);
LabelMap read_label_nzt(const std::string& path);

/// Writes <dir>/<id>_img.nzt, <dir>/<id>_lbl.nzt and <dir>/manifest.json.
/// Returns the manifest path.
std::string write_dataset(const Dataset& ds, const std::string& dir);

/// Parses the manifest, checks every file exists, has consistent geometry
/// and only valid class ids, and returns a dataset reading images on access.
/// Throws DataError naming the offending sample.
Dataset load_dataset(const std::string& manifest_path);

// ---- Synthetic shapes

struct SynthSpec {
  std::int64_t height = 64, width = 64;
  std::int64_t num_classes = 3;
  std::int64_t channels = 1;
  int shapes_per_image = 4;
  double intensity_separation = 1.0;
  double noise_sigma = 0.35;

  void validate() const;
};

/// Canvas and class count of a dataset preset; SynthShapes also fixes the
/// default noise level.
SynthSpec preset_synth_spec(const std::string& preset);

/// Random ellipses and rectangles on a zero background. A shape of class k
/// has intensity k·separation; Gaussian noise is added on top. Every image
/// cycles through all foreground classes. Deterministic in `seed`.
Dataset generate_synthetic(const SynthSpec& spec, std::size_t count, std::uint64_t seed,
                           const std::string& name = "SynthShapes");

// ---- Preprocessing, split, augmentation

/// Per-channel z-score (std floored at 1e-8), then centered crop or pad to
/// height×width. Padding pixels get image value 0 and label kIgnoreLabel.
SegmentationSample preprocess(const SegmentationSample& s, std::int64_t height, std::int64_t width);

/// Seeded Fisher–Yates permutation of [0, n).
std::vector<std::size_t> permutation(std::size_t n, std::mt19937_64& rng);

struct Split {
  std::vector<std::size_t> train, val;
};
/// Seeded shuffle of [0, n); the first round(ratio·n) go to train.
Split split_indices(std::size_t n, double ratio, std::uint64_t seed);
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double ratio, std::uint64_t seed);

/// axis 0 flips rows (vertical), axis 1 flips columns (horizontal).
SegmentationSample flip(const SegmentationSample& s, int axis);
/// Counter-clockwise rotation by k·90°.
SegmentationSample rot90(const SegmentationSample& s, int k);

struct AugmentOptions {
  double flip_prob = 0.5;    // per axis
  double rotate_prob = 0.5;  // one of 90/180/270°; 90/270 only on square samples
};
SegmentationSample augment(const SegmentationSample& s, std::mt19937_64& rng, const AugmentOptions& opt = {});

/// Stacked batch: images B×C×H×W, labels B·H·W row-major.
struct Batch {
  Tensor images;
  std::vector<std::uint16_t> labels;
  std::int64_t size = 0, height = 0, width = 0;
};
/// All samples must share geometry.
Batch make_batch(const std::vector<SegmentationSample>& samples, DType dtype = DType::f32);

}  // namespace nnuzoo::data
