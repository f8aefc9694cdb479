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

#include "nnuzoo/blocks/module.hpp"

#include <algorithm>
#include <cmath>

#include "nnuzoo/error.hpp"

namespace nnuzoo {

ParamInit::ParamInit(std::uint64_t seed, DType dtype, bool allocate)
    : rng_(seed), dtype_(dtype), allocate_(allocate) {}

Tensor ParamInit::fan_in_uniform(const Shape& shape, std::int64_t fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(fan_in, 1)));
  return uniform(shape, -bound, bound);
}

Tensor ParamInit::uniform(const Shape& shape, double lo, double hi) {
  if (!allocate_) return Tensor::meta(shape, dtype_);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& e : v) e = dist(rng_);
  return Tensor::from_vector(shape, v, dtype_);
}

Tensor ParamInit::normal(const Shape& shape, double stddev) {
  if (!allocate_) return Tensor::meta(shape, dtype_);
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& e : v) e = dist(rng_);
  return Tensor::from_vector(shape, v, dtype_);
}

Tensor ParamInit::constant(const Shape& shape, double value) {
  if (!allocate_) return Tensor::meta(shape, dtype_);
  return Tensor::full(shape, value, dtype_);
}

Tensor ParamInit::values(const Shape& shape, const std::vector<double>& v) {
  if (!allocate_) return Tensor::meta(shape, dtype_);
  return Tensor::from_vector(shape, v, dtype_);
}

Tensor Module::forward(const Tensor&) { throw ValueError("module has no single-input forward"); }

Tensor Module::add_param(std::string name, Tensor t) {
  params_.emplace_back(std::move(name), t);
  return t;
}

void Module::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  for (const auto& [name, t] : params_) out.emplace_back(prefix + name, t);
  for (const auto& [name, child] : children_) child->collect(prefix + name + ".", out);
}

std::vector<NamedTensor> Module::named_parameters() const {
  std::vector<NamedTensor> out;
  collect("", out);
  return out;
}

std::vector<Tensor> Module::parameters() const {
  std::vector<Tensor> out;
  for (auto& [_, t] : named_parameters()) out.push_back(t);
  return out;
}

std::int64_t Module::count_params() const {
  std::int64_t n = 0;
  for (const auto& [_, t] : named_parameters()) n += t.numel();
  return n;
}

}  // namespace nnuzoo
