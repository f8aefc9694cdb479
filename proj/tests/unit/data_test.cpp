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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "nnuzoo/data/dataset.hpp"
#include "json.hpp"

using namespace nnuzoo;
using namespace nnuzoo::data;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
  const auto d = fs::path(::testing::TempDir()) / ("nnuzoo_data_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d.string();
}

SegmentationSample ramp_sample(std::int64_t C, std::int64_t H, std::int64_t W) {
  SegmentationSample s;
  s.id = "ramp";
  std::vector<double> v(static_cast<std::size_t>(C * H * W));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  s.image = Tensor::from_vector({C, H, W}, v);
  s.label = LabelMap{H, W, std::vector<std::uint16_t>(static_cast<std::size_t>(H * W))};
  for (std::int64_t i = 0; i < H * W; ++i) s.label.values[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(i % 5);
  return s;
}

bool samples_equal(const SegmentationSample& a, const SegmentationSample& b) {
  return a.image.shape() == b.image.shape() && bit_equal(a.image, b.image) && a.label.height == b.label.height &&
         a.label.width == b.label.width && a.label.values == b.label.values;
}

std::vector<std::pair<double, int>> pixel_multiset(const SegmentationSample& s) {
  std::vector<std::pair<double, int>> m;
  const auto v = s.image.to_vector();
  for (std::size_t i = 0; i < s.label.values.size(); ++i) m.emplace_back(v[i], s.label.values[i]);
  std::sort(m.begin(), m.end());
  return m;
}

}  // namespace

TEST(Synth, DeterministicPerSeed) {
  SynthSpec spec;
  const auto a = generate_synthetic(spec, 5, 42), b = generate_synthetic(spec, 5, 42), c = generate_synthetic(spec, 5, 43);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_TRUE(samples_equal(a.at(i), b.at(i)));
  EXPECT_FALSE(samples_equal(a.at(0), c.at(0)));
}

TEST(Synth, NoiselessTaskIsThresholdSeparable) {
  SynthSpec spec;
  spec.noise_sigma = 0;
  spec.intensity_separation = 1.0;
  spec.num_classes = 4;
  const auto ds = generate_synthetic(spec, 20, 3);
  std::int64_t correct = 0, total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto s = ds.at(i);
    const auto v = s.image.to_vector();
    for (std::size_t p = 0; p < v.size(); ++p) {
      const auto pred = static_cast<int>(std::floor(v[p] + 0.5));
      correct += pred == s.label.values[p];
      ++total;
    }
  }
  EXPECT_EQ(correct, total);
}

TEST(Synth, AllClassesAppear) {
  const auto ds = generate_synthetic(SynthSpec{}, 100, 9);
  std::set<int> seen;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (auto v : ds.at(i).label.values) seen.insert(v);
  EXPECT_EQ(seen, (std::set<int>{0, 1, 2}));
}

TEST(Synth, RejectsDegenerateSpec) {
  SynthSpec s;
  s.height = 4;
  EXPECT_THROW(generate_synthetic(s, 1, 0), ValueError);
  s = SynthSpec{};
  s.num_classes = 1;
  EXPECT_THROW(generate_synthetic(s, 1, 0), ValueError);
  s = SynthSpec{};
  s.shapes_per_image = 0;
  EXPECT_THROW(generate_synthetic(s, 1, 0), ValueError);
  EXPECT_THROW(generate_synthetic(SynthSpec{}, 0, 0), ValueError);
}

TEST(Nzt, ImageAndLabelRoundTrip) {
  const auto dir = temp_dir("nzt");
  const auto s = ramp_sample(2, 5, 7);
  write_image_nzt(dir + "/a.nzt", s.image);
  write_label_nzt(dir + "/b.nzt", s.label);
  EXPECT_TRUE(bit_equal(read_image_nzt(dir + "/a.nzt"), s.image));
  EXPECT_EQ(read_label_nzt(dir + "/b.nzt").values, s.label.values);
  const Tensor d = Tensor::from_vector({1, 2, 2}, {0.1, -2.5, 1e300, 3}, DType::f64);
  write_image_nzt(dir + "/d.nzt", d);
  EXPECT_TRUE(bit_equal(read_image_nzt(dir + "/d.nzt"), d));
  // Header layout: magic, dtype, rank, dims.
  std::ifstream f(dir + "/b.nzt", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "NZT1");
  EXPECT_EQ(bytes[4], 2);
  EXPECT_EQ(bytes[5], 2);
  EXPECT_EQ(bytes[6], 5);
  EXPECT_EQ(bytes[10], 7);
  EXPECT_EQ(bytes.size(), 4u + 2 + 8 + 2 * 35);
  EXPECT_THROW(read_image_nzt(dir + "/b.nzt"), DataError);
  EXPECT_THROW(read_label_nzt(dir + "/missing.nzt"), DataError);
}

TEST(Manifest, DatasetRoundTripIsBitExact) {
  const auto dir = temp_dir("roundtrip");
  const auto ds = generate_synthetic(SynthSpec{}, 6, 1);
  const auto manifest = write_dataset(ds, dir);
  const auto back = load_dataset(manifest);
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_EQ(back.num_classes(), 3);
  EXPECT_EQ(back.name(), "SynthShapes");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.id(i), ds.id(i));
    EXPECT_TRUE(samples_equal(back.at(i), ds.at(i)));
  }
}

TEST(Manifest, PresetFormatCarriesClassCount) {
  const auto dir = temp_dir("camus");
  auto spec = preset_synth_spec("CAMUS");
  spec.height = 32;
  spec.width = 32;
  const auto manifest = write_dataset(generate_synthetic(spec, 2, 0, "CAMUS"), dir);
  EXPECT_EQ(load_dataset(manifest).num_classes(), 3);
  EXPECT_EQ(preset_synth_spec("PET").num_classes, 23);
  EXPECT_THROW(preset_synth_spec("Retina"), ValueError);
}

TEST(Manifest, OutOfRangeLabelNamesSample) {
  const auto dir = temp_dir("badlabel");
  auto ds = generate_synthetic(SynthSpec{}, 3, 1);
  auto s = ds.at(1);
  s.label.values[10] = 3;  // == num_classes
  Dataset bad("bad", 3);
  bad.add(ds.at(0));
  bad.add(s);
  const auto manifest = write_dataset(bad, dir);
  try {
    load_dataset(manifest);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(s.id), std::string::npos) << e.what();
  }
}

TEST(Manifest, MissingFileAndMalformedManifest) {
  const auto dir = temp_dir("missing");
  const auto manifest = write_dataset(generate_synthetic(SynthSpec{}, 2, 1), dir);
  fs::remove(fs::path(dir) / "case_00001_img.nzt");
  try {
    load_dataset(manifest);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("case_00001"), std::string::npos);
  }
  std::ofstream(dir + "/broken.json") << "{not json";
  EXPECT_THROW(load_dataset(dir + "/broken.json"), DataError);
  std::ofstream(dir + "/partial.json") << R"({"name": "x"})";
  EXPECT_THROW(load_dataset(dir + "/partial.json"), DataError);
  EXPECT_THROW(load_dataset(dir + "/none.json"), DataError);
}

TEST(Preprocess, ConstantImageBecomesZero) {
  auto s = ramp_sample(1, 64, 64);
  s.image = Tensor::full({1, 64, 64}, 7.0);
  const auto p = preprocess(s, 64, 64);
  for (double v : p.image.to_vector()) EXPECT_EQ(v, 0.0);
}

TEST(Preprocess, ZeroMeanUnitStdPerChannel) {
  const auto ds = generate_synthetic(SynthSpec{}, 1, 5);
  auto s = ds.at(0);
  const auto p = preprocess(s, 64, 64);
  const auto v = p.image.to_vector();
  double mean = 0, sq = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) sq += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 1e-5);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(v.size())), 1.0, 1e-5);
}

TEST(Preprocess, CenterCropAndSymmetricPad) {
  auto big = ramp_sample(1, 300, 300);
  auto p = preprocess(big, 256, 256);
  EXPECT_EQ(p.image.shape(), (Shape{1, 256, 256}));
  // Crop offset 22: output (0,0) is input (22,22).
  EXPECT_EQ(p.label.at(0, 0), big.label.at(22, 22));
  EXPECT_EQ(p.label.at(255, 255), big.label.at(277, 277));
  for (auto v : p.label.values) EXPECT_NE(v, kIgnoreLabel);

  auto small = ramp_sample(1, 200, 200);
  p = preprocess(small, 256, 256);
  EXPECT_EQ(p.label.at(27, 100), kIgnoreLabel);
  EXPECT_EQ(p.label.at(28, 28), small.label.at(0, 0));
  EXPECT_EQ(p.label.at(227, 227), small.label.at(199, 199));
  EXPECT_EQ(p.label.at(228, 100), kIgnoreLabel);
  EXPECT_EQ(p.image.to_vector()[0], 0.0);
  std::int64_t ignored = 0;
  for (auto v : p.label.values) ignored += v == kIgnoreLabel;
  EXPECT_EQ(ignored, 256 * 256 - 200 * 200);
}

TEST(Preprocess, Errors) {
  auto s = ramp_sample(1, 64, 64);
  EXPECT_THROW(preprocess(s, 48, 64), ValueError);
  SegmentationSample empty;
  empty.image = Tensor::zeros({1, 0, 0});
  EXPECT_THROW(preprocess(empty, 64, 64), ValueError);
}

TEST(Split, EightyTwenty) {
  const auto s = split_indices(10, 0.8, 1);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.val.size(), 2u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  for (auto v : s.val) EXPECT_TRUE(all.insert(v).second);
  EXPECT_EQ(all.size(), 10u);
  const auto again = split_indices(10, 0.8, 1);
  EXPECT_EQ(again.train, s.train);
  EXPECT_EQ(again.val, s.val);
  EXPECT_EQ(split_indices(101, 0.8, 2).train.size(), 81u);
  EXPECT_THROW(split_indices(1, 0.8, 1), ValueError);
}

TEST(Split, DatasetMembership) {
  const auto ds = generate_synthetic(SynthSpec{}, 10, 4);
  const auto [tr, va] = split_dataset(ds, 0.8, 7);
  EXPECT_EQ(tr.size(), 8u);
  EXPECT_EQ(va.size(), 2u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < tr.size(); ++i) ids.insert(tr.id(i));
  for (std::size_t i = 0; i < va.size(); ++i) EXPECT_TRUE(ids.insert(va.id(i)).second);
  EXPECT_EQ(ids.size(), 10u);
}

TEST(Augment, FlipTwiceIsIdentity) {
  const auto s = ramp_sample(2, 6, 9);
  for (int axis : {0, 1}) EXPECT_TRUE(samples_equal(flip(flip(s, axis), axis), s));
  EXPECT_TRUE(samples_equal(rot90(s, 4), s));
  EXPECT_TRUE(samples_equal(rot90(rot90(s, 1), 3), s));
  EXPECT_THROW(flip(s, 2), ValueError);
}

TEST(Augment, CornerTracking) {
  auto s = ramp_sample(1, 4, 6);
  std::fill(s.label.values.begin(), s.label.values.end(), 0);
  s.label.values[0] = 7;  // top-left (0,0)
  EXPECT_EQ(flip(s, 0).label.at(3, 0), 7);
  EXPECT_EQ(flip(s, 1).label.at(0, 5), 7);
  const auto r = rot90(s, 1);  // counter-clockwise: top-left → bottom-left
  EXPECT_EQ(r.height(), 6);
  EXPECT_EQ(r.width(), 4);
  EXPECT_EQ(r.label.at(5, 0), 7);
  EXPECT_EQ(r.image.to_vector()[5 * 4 + 0], 0.0);  // image value of input (0,0)
  EXPECT_EQ(rot90(s, 2).label.at(3, 5), 7);
  EXPECT_EQ(rot90(s, 3).label.at(0, 3), 7);
}

TEST(Augment, ZeroProbabilityIsIdentity) {
  const auto s = ramp_sample(1, 8, 8);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(samples_equal(augment(s, rng, {0.0, 0.0}), s));
}

TEST(Augment, PreservesPixelMultisetAndIsSeeded) {
  const auto s = ramp_sample(1, 8, 8);
  std::mt19937_64 a(5), b(5);
  bool changed = false;
  for (int i = 0; i < 20; ++i) {
    const auto x = augment(s, a), y = augment(s, b);
    EXPECT_TRUE(samples_equal(x, y));
    EXPECT_EQ(pixel_multiset(x), pixel_multiset(s));
    changed |= !samples_equal(x, s);
  }
  EXPECT_TRUE(changed);
  // Non-square samples keep their shape.
  const auto r = ramp_sample(1, 8, 4);
  std::mt19937_64 c(1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(augment(r, c, {0.5, 1.0}).image.shape(), r.image.shape());
}

TEST(Batch, StacksSamples) {
  const auto ds = generate_synthetic(SynthSpec{}, 3, 2);
  const auto b = make_batch({ds.at(0), ds.at(1), ds.at(2)});
  EXPECT_EQ(b.images.shape(), (Shape{3, 1, 64, 64}));
  EXPECT_EQ(b.labels.size(), 3u * 64 * 64);
  EXPECT_EQ(b.labels[64 * 64 + 5], ds.at(1).label.values[5]);
  EXPECT_THROW(make_batch({ds.at(0), ramp_sample(1, 8, 8)}), ShapeError);
}
