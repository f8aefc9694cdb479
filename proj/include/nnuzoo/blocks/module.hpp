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
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo {

using NamedTensor = std::pair<std::string, Tensor>;

/// Source of initial parameter values. Draws come from one generator in
/// construction order, so a model built twice from the same seed is
/// bit-identical. With allocate=false every parameter is a meta tensor:
/// shapes (and hence parameter counts) exist but no storage is touched.
class ParamInit {
 public:
  ParamInit(std::uint64_t seed, DType dtype = DType::f32, bool allocate = true);

  DType dtype() const { return dtype_; }
  bool allocate() const { return allocate_; }

  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Tensor fan_in_uniform(const Shape& shape, std::int64_t fan_in);
  Tensor uniform(const Shape& shape, double lo, double hi);
  Tensor normal(const Shape& shape, double stddev);
  Tensor constant(const Shape& shape, double value);
  Tensor zeros(const Shape& shape) { return constant(shape, 0.0); }
  Tensor ones(const Shape& shape) { return constant(shape, 1.0); }
  Tensor values(const Shape& shape, const std::vector<double>& v);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  DType dtype_;
  bool allocate_;
};

/// Owner of named parameters and child modules.
class Module {
 public:
  virtual ~Module() = default;
  Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  /// Single-input forward; modules with other signatures leave this unimplemented.
  virtual Tensor forward(const Tensor& x);

  /// Depth-first, registration order, names joined with '.'.
  std::vector<NamedTensor> named_parameters() const;
  std::vector<Tensor> parameters() const;
  std::int64_t count_params() const;
  const std::vector<std::pair<std::string, std::unique_ptr<Module>>>& children() const { return children_; }

 protected:
  Tensor add_param(std::string name, Tensor t);
  template <class M>
  M* add_module(std::string name, std::unique_ptr<M> m) {
    M* raw = m.get();
    children_.emplace_back(std::move(name), std::move(m));
    return raw;
  }

 private:
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;

  std::vector<NamedTensor> params_;
  std::vector<std::pair<std::string, std::unique_ptr<Module>>> children_;
};

}  // namespace nnuzoo
