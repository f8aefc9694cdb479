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

#include "nnuzoo/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace nnuzoo::data {

namespace fs = std::filesystem;

Dataset::Dataset(std::string name, std::int64_t num_classes, std::string modality)
    : name_(std::move(name)), num_classes_(num_classes), modality_(std::move(modality)) {
  if (num_classes_ < 2) throw ValueError("Dataset: num_classes must be >= 2");
}

void Dataset::add(SegmentationSample s) {
  std::string id = s.id;
  entries_.push_back({std::move(id), std::make_shared<const SegmentationSample>(std::move(s)), {}});
}

void Dataset::add_lazy(std::string id, std::function<SegmentationSample()> loader) {
  entries_.push_back({std::move(id), nullptr, std::move(loader)});
}

SegmentationSample Dataset::at(std::size_t i) const {
  const auto& e = entries_.at(i);
  return e.sample ? *e.sample : e.loader();
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out = *this;
  out.entries_.clear();
  for (auto i : indices) out.entries_.push_back(entries_.at(i));
  return out;
}

Dataset Dataset::map(const std::function<SegmentationSample(const SegmentationSample&)>& fn) const {
  Dataset out = *this;
  out.entries_.clear();
  for (std::size_t i = 0; i < size(); ++i) out.add(fn(at(i)));
  return out;
}

// ---------------------------------------------------------------- NZT1 files

namespace {

constexpr char kNztMagic[4] = {'N', 'Z', 'T', '1'};

struct NztHeader {
  std::uint8_t dtype = 0;
  Shape shape;
};

void put_u32(std::ostream& o, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  o.write(b, 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("truncated NZT1 file '" + path + "'");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw DataError("cannot write '" + path + "'");
  return o;
}

void write_header(std::ostream& o, std::uint8_t dtype, const Shape& shape) {
  o.write(kNztMagic, 4);
  o.put(static_cast<char>(dtype));
  o.put(static_cast<char>(shape.size()));
  for (auto d : shape) put_u32(o, static_cast<std::uint32_t>(d));
}

NztHeader read_header(std::istream& in, const std::string& path) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kNztMagic, 4) != 0) throw DataError("'" + path + "' is not an NZT1 file");
  NztHeader h;
  const int dtype = in.get(), rank = in.get();
  if (dtype == EOF || rank == EOF) throw DataError("truncated NZT1 file '" + path + "'");
  if (dtype > 2) throw DataError("'" + path + "' has unknown dtype code " + std::to_string(dtype));
  h.dtype = static_cast<std::uint8_t>(dtype);
  for (int i = 0; i < rank; ++i) h.shape.push_back(get_u32(in, path));
  return h;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

template <class U, class T>
void write_le(std::ostream& o, std::span<const T> values) {
  std::vector<char> buf(values.size() * sizeof(U));
  for (std::size_t i = 0; i < values.size(); ++i) {
    U bits;
    std::memcpy(&bits, &values[i], sizeof(U));
    for (std::size_t k = 0; k < sizeof(U); ++k) buf[i * sizeof(U) + k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  }
  o.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

template <class U, class T>
std::vector<T> read_le(std::istream& in, std::size_t n, const std::string& path) {
  std::vector<unsigned char> buf(n * sizeof(U));
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
    throw DataError("truncated NZT1 file '" + path + "'");
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    U bits = 0;
    for (std::size_t k = 0; k < sizeof(U); ++k) bits |= static_cast<U>(static_cast<U>(buf[i * sizeof(U) + k]) << (8 * k));
    std::memcpy(&out[i], &bits, sizeof(U));
  }
  return out;
}

void expect_eof(std::istream& in, const std::string& path) {
  if (in.peek() != EOF) throw DataError("'" + path + "' has trailing bytes");
}

}  // namespace

void write_image_nzt(const std::string& path, const Tensor& image) {
  auto o = open_out(path);
  write_header(o, static_cast<std::uint8_t>(image.dtype()), image.shape());
  if (image.dtype() == DType::f32) write_le<std::uint32_t>(o, image.data<float>());
  else write_le<std::uint64_t>(o, image.data<double>());
  if (!o) throw DataError("failed writing '" + path + "'");
}

Tensor read_image_nzt(const std::string& path) {
  auto in = open_in(path);
  const auto h = read_header(in, path);
  const auto n = static_cast<std::size_t>(shape_numel(h.shape));
  Tensor t;
  if (h.dtype == 0) t = Tensor::from_floats(h.shape, read_le<std::uint32_t, float>(in, n, path));
  else if (h.dtype == 1) t = Tensor::from_doubles(h.shape, read_le<std::uint64_t, double>(in, n, path));
  else throw DataError("'" + path + "' holds labels, expected an image");
  expect_eof(in, path);
  return t;
}

void write_label_nzt(const std::string& path, const LabelMap& label) {
  auto o = open_out(path);
  write_header(o, 2, {label.height, label.width});
  write_le<std::uint16_t>(o, std::span<const std::uint16_t>(label.values));
  if (!o) throw DataError("failed writing '" + path + "'");
}

LabelMap read_label_nzt(const std::string& path) {
  auto in = open_in(path);
  const auto h = read_header(in, path);
  if (h.dtype != 2 || h.shape.size() != 2) throw DataError("'" + path + "' is not a rank-2 u16 label map");
  LabelMap l;
  l.height = h.shape[0];
  l.width = h.shape[1];
  l.values = read_le<std::uint16_t, std::uint16_t>(in, static_cast<std::size_t>(l.height * l.width), path);
  expect_eof(in, path);
  return l;
}

// ---------------------------------------------------------------- manifests

std::string write_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto s = ds.at(i);
    const std::string img = s.id + "_img.nzt", lbl = s.id + "_lbl.nzt";
    write_image_nzt((fs::path(dir) / img).string(), s.image);
    write_label_nzt((fs::path(dir) / lbl).string(), s.label);
    samples.push_back({{"id", s.id}, {"image", img}, {"label", lbl}});
  }
  const nlohmann::json m{{"name", ds.name()},
                         {"num_classes", ds.num_classes()},
                         {"modality", ds.modality()},
                         {"samples", samples}};
  const auto path = (fs::path(dir) / "manifest.json").string();
  auto o = open_out(path);
  o << m.dump() << "\n";
  return path;
}

Dataset load_dataset(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest '" + manifest_path + "'");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest '" + manifest_path + "' does not parse: " + e.what());
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  try {
    Dataset ds(m.at("name").get<std::string>(), m.at("num_classes").get<std::int64_t>(),
               m.value("modality", std::string("unknown")));
    const auto K = ds.num_classes();
    for (const auto& rec : m.at("samples")) {
      const auto id = rec.at("id").get<std::string>();
      const auto img = (base / rec.at("image").get<std::string>()).string();
      const auto lbl = (base / rec.at("label").get<std::string>()).string();
      for (const auto& p : {img, lbl})
        if (!fs::exists(p)) throw DataError("sample '" + id + "': missing file '" + p + "'");
      NztHeader h;
      {
        auto f = open_in(img);
        h = read_header(f, img);
      }
      const auto label = read_label_nzt(lbl);
      if (h.dtype > 1 || h.shape.size() != 3 || h.shape[1] != label.height || h.shape[2] != label.width)
        throw DataError("sample '" + id + "': image " + shape_str(h.shape) + " does not match label " +
                        std::to_string(label.height) + "×" + std::to_string(label.width));
      for (auto v : label.values)
        if (v != kIgnoreLabel && v >= K)
          throw DataError("sample '" + id + "': class id " + std::to_string(v) + " outside [0, " + std::to_string(K) +
                          ")");
      ds.add_lazy(id, [id, img, lbl] {
        SegmentationSample s;
        s.id = id;
        s.image = read_image_nzt(img);
        s.label = read_label_nzt(lbl);
        return s;
      });
    }
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest '" + manifest_path + "' is malformed: " + e.what());
  } catch (const ValueError& e) {
    throw DataError("manifest '" + manifest_path + "': " + e.what());
  }
}

// ---------------------------------------------------------------- batches

Batch make_batch(const std::vector<SegmentationSample>& samples, DType dtype) {
  if (samples.empty()) throw ValueError("make_batch: no samples");
  const auto C = samples[0].channels(), H = samples[0].height(), W = samples[0].width();
  Batch b;
  b.size = static_cast<std::int64_t>(samples.size());
  b.height = H;
  b.width = W;
  std::vector<double> img;
  img.reserve(static_cast<std::size_t>(b.size * C * H * W));
  for (const auto& s : samples) {
    if (s.channels() != C || s.height() != H || s.width() != W || s.label.height != H || s.label.width != W)
      throw ShapeError("make_batch: sample '" + s.id + "' geometry differs from the first sample");
    const auto v = s.image.to_vector();
    img.insert(img.end(), v.begin(), v.end());
    b.labels.insert(b.labels.end(), s.label.values.begin(), s.label.values.end());
  }
  b.images = Tensor::from_vector({b.size, C, H, W}, img, dtype);
  return b;
}

}  // namespace nnuzoo::data
