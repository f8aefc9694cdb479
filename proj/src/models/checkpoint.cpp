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

#include "nnuzoo/models/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace nnuzoo {

namespace {

constexpr char kMagic[8] = {'N', 'N', 'U', 'Z', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : buf(b) {}
  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw DataError("checkpoint truncated at byte " + std::to_string(pos));
  }
  std::uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos++]) << (8 * i);
    return v;
  }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
    pos += n;
    return s;
  }
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Model& model) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.str(arch_name(model.config().arch));
  w.str(config_to_json(model.config()));
  const auto params = model.named_parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    if (t.is_meta()) throw ValueError("serialize_checkpoint: model was built without storage");
    w.str(name);
    w.u8(static_cast<std::uint8_t>(t.dtype()));
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (auto d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    if (t.dtype() == DType::f32) {
      for (float v : t.data<float>()) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        w.u32(bits);
      }
    } else {
      for (double v : t.data<double>()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        w.u64(bits);
      }
    }
  }
  return w.out;
}

Checkpoint parse_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.need(sizeof kMagic);
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw DataError("not a checkpoint (bad magic)");
  r.pos = sizeof kMagic;
  const auto version = r.u32();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.arch = r.str();
  c.config = config_from_json(r.str());
  if (arch_name(c.config.arch) != c.arch) throw DataError("checkpoint architecture and config disagree");
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    const auto dtype = r.u8();
    if (dtype > 1) throw DataError("checkpoint leaf '" + name + "' has unknown dtype");
    const auto rank = r.u8();
    Shape shape;
    for (int k = 0; k < rank; ++k) shape.push_back(r.u32());
    const auto numel = shape_numel(shape);
    Tensor t;
    if (dtype == 0) {
      std::vector<float> v(static_cast<std::size_t>(numel));
      for (auto& x : v) {
        const auto bits = r.u32();
        std::memcpy(&x, &bits, 4);
      }
      t = Tensor::from_floats(shape, std::move(v));
    } else {
      std::vector<double> v(static_cast<std::size_t>(numel));
      for (auto& x : v) {
        const auto bits = r.u64();
        std::memcpy(&x, &bits, 8);
      }
      t = Tensor::from_doubles(shape, std::move(v));
    }
    c.tensors.emplace_back(std::move(name), std::move(t));
  }
  if (r.pos != bytes.size()) throw DataError("checkpoint has trailing bytes");
  return c;
}

void save_checkpoint(const std::string& path, const Model& model) {
  const auto bytes = serialize_checkpoint(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write checkpoint '" + path + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

void load_weights(Model& model, const Checkpoint& ckpt) {
  auto params = model.named_parameters();
  if (params.size() != ckpt.tensors.size())
    throw DataError("checkpoint has " + std::to_string(ckpt.tensors.size()) + " tensors, model has " +
                    std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, dst] = params[i];
    const auto& [cname, src] = ckpt.tensors[i];
    if (name != cname || dst.shape() != src.shape())
      throw DataError("checkpoint leaf " + cname + " " + shape_str(src.shape()) + " does not match model leaf " +
                      name + " " + shape_str(dst.shape()));
    Tensor d = dst;
    d.copy_from(src);
  }
}

std::unique_ptr<Model> load_model(const std::string& path) {
  const auto ckpt = read_checkpoint(path);
  auto model = build_model(ckpt.config);
  load_weights(*model, ckpt);
  return model;
}

}  // namespace nnuzoo
