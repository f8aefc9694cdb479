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

#include "nnuzoo/tensor/primitive.hpp"

#include <functional>
#include <map>

#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo {

Attrs& Attrs::set(const std::string& key, AttrValue value) {
  values_[key] = std::move(value);
  return *this;
}

namespace {

[[noreturn]] void missing(const std::string& key) { throw ValueError("missing attribute '" + key + "'"); }

}  // namespace

std::int64_t Attrs::get_int(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  if (auto* b = std::get_if<bool>(&it->second)) return *b ? 1 : 0;
  throw ValueError("attribute '" + key + "' is not an integer");
}

std::int64_t Attrs::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double Attrs::get_double(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (auto* v = std::get_if<double>(&it->second)) return *v;
  if (auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  throw ValueError("attribute '" + key + "' is not a number");
}

double Attrs::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool Attrs::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (auto* b = std::get_if<bool>(&it->second)) return *b;
  if (auto* i = std::get_if<std::int64_t>(&it->second)) return *i != 0;
  throw ValueError("attribute '" + key + "' is not a boolean");
}

std::vector<std::int64_t> Attrs::get_ints(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (auto* v = std::get_if<std::vector<std::int64_t>>(&it->second)) return *v;
  if (auto* i = std::get_if<std::int64_t>(&it->second)) return {*i};
  throw ValueError("attribute '" + key + "' is not an integer list");
}

std::vector<std::int64_t> Attrs::get_ints(const std::string& key, std::vector<std::int64_t> fallback) const {
  return has(key) ? get_ints(key) : fallback;
}

namespace {

using Impl = std::function<Tensor(const std::vector<Tensor>&, const Attrs&)>;

std::vector<int> to_axes(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

void arity(const std::string& op, const std::vector<Tensor>& in, std::size_t n) {
  if (in.size() != n)
    throw ValueError(op + ": expected " + std::to_string(n) + " inputs, got " + std::to_string(in.size()));
}

const std::map<std::string, Impl>& registry() {
  static const std::map<std::string, Impl> table = [] {
    std::map<std::string, Impl> t;
    auto binary = [&t](const std::string& name, Tensor (*fn)(const Tensor&, const Tensor&)) {
      t[name] = [name, fn](const std::vector<Tensor>& in, const Attrs&) {
        arity(name, in, 2);
        return fn(in[0], in[1]);
      };
    };
    auto unary = [&t](const std::string& name, Tensor (*fn)(const Tensor&)) {
      t[name] = [name, fn](const std::vector<Tensor>& in, const Attrs&) {
        arity(name, in, 1);
        return fn(in[0]);
      };
    };
    binary("add", ops::add);
    binary("sub", ops::sub);
    binary("mul", ops::mul);
    binary("div", ops::div);
    binary("matmul", ops::matmul);
    unary("exp", ops::exp);
    unary("log", ops::log);
    unary("neg", ops::neg);
    unary("sigmoid", ops::sigmoid);
    unary("relu", ops::relu);
    unary("gelu", ops::gelu);
    unary("silu", ops::silu);
    unary("softplus", ops::softplus);
    t["leaky_relu"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("leaky_relu", in, 1);
      return ops::leaky_relu(in[0], a.get_double("slope", 0.01));
    };
    t["sum"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("sum", in, 1);
      return ops::sum(in[0], to_axes(a.get_ints("axes", {})), a.get_bool("keepdim", false));
    };
    t["mean"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("mean", in, 1);
      return ops::mean(in[0], to_axes(a.get_ints("axes", {})), a.get_bool("keepdim", false));
    };
    t["softmax"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("softmax", in, 1);
      return ops::softmax(in[0], static_cast<int>(a.get_int("axis", -1)));
    };
    t["log_softmax"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("log_softmax", in, 1);
      return ops::log_softmax(in[0], static_cast<int>(a.get_int("axis", -1)));
    };
    t["concat"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      return ops::concat(std::span<const Tensor>(in), static_cast<int>(a.get_int("axis")));
    };
    t["slice"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("slice", in, 1);
      return ops::slice(in[0], static_cast<int>(a.get_int("axis")), a.get_int("start"), a.get_int("stop"));
    };
    t["reshape"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("reshape", in, 1);
      return ops::reshape(in[0], a.get_ints("shape"));
    };
    t["permute"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("permute", in, 1);
      return ops::permute(in[0], to_axes(a.get_ints("order")));
    };
    t["pad"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("pad", in, 1);
      const auto flat = a.get_ints("pads");
      if (flat.size() % 2 != 0) throw ValueError("pad: 'pads' must hold (before, after) pairs");
      std::vector<std::pair<std::int64_t, std::int64_t>> pads;
      for (std::size_t i = 0; i < flat.size(); i += 2) pads.emplace_back(flat[i], flat[i + 1]);
      return ops::pad(in[0], pads, a.get_double("value", 0.0));
    };
    t["index_select"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("index_select", in, 1);
      return ops::index_select(in[0], static_cast<int>(a.get_int("axis")), a.get_ints("indices"));
    };
    t["upsample_nearest"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("upsample_nearest", in, 1);
      return ops::upsample2d(in[0], static_cast<int>(a.get_int("scale")), ops::UpsampleMode::nearest);
    };
    t["upsample_bilinear"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("upsample_bilinear", in, 1);
      return ops::upsample2d(in[0], static_cast<int>(a.get_int("scale")), ops::UpsampleMode::bilinear);
    };
    t["max_pool2d"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("max_pool2d", in, 1);
      const auto k = a.get_int("kernel");
      return ops::max_pool2d(in[0], static_cast<int>(k), static_cast<int>(a.get_int("stride", k)));
    };
    t["layer_norm"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("layer_norm", in, 1);
      return ops::layer_norm(in[0], to_axes(a.get_ints("axes", {-1})), a.get_double("eps", 1e-5));
    };
    t["instance_norm"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("instance_norm", in, 1);
      return ops::instance_norm(in[0], a.get_double("eps", 1e-5));
    };
    t["dropout"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      arity("dropout", in, 1);
      return ops::dropout(in[0], a.get_double("p"), a.get_bool("train", true),
                          static_cast<std::uint64_t>(a.get_int("seed", 0)));
    };
    t["conv2d"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      if (in.size() != 2 && in.size() != 3) throw ValueError("conv2d: expected 2 or 3 inputs");
      std::optional<Tensor> bias;
      if (in.size() == 3) bias = in[2];
      return ops::conv2d(in[0], in[1], bias,
                         ops::Conv2dOptions{static_cast<int>(a.get_int("stride", 1)),
                                            static_cast<int>(a.get_int("padding", 0)),
                                            static_cast<int>(a.get_int("dilation", 1)),
                                            static_cast<int>(a.get_int("groups", 1))});
    };
    t["conv_transpose2d"] = [](const std::vector<Tensor>& in, const Attrs& a) {
      if (in.size() != 2 && in.size() != 3) throw ValueError("conv_transpose2d: expected 2 or 3 inputs");
      std::optional<Tensor> bias;
      if (in.size() == 3) bias = in[2];
      return ops::conv_transpose2d(in[0], in[1], bias, static_cast<int>(a.get_int("stride", 1)),
                                   static_cast<int>(a.get_int("padding", 0)));
    };
    return t;
  }();
  return table;
}

}  // namespace

Tensor apply_primitive(const std::string& op_id, const std::vector<Tensor>& inputs, const Attrs& attrs) {
  const auto& table = registry();
  auto it = table.find(op_id);
  if (it == table.end()) throw ValueError("unknown primitive '" + op_id + "'");
  return it->second(inputs, attrs);
}

std::vector<std::string> primitive_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

}  // namespace nnuzoo
