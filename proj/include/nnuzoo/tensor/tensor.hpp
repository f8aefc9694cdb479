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
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nnuzoo/error.hpp"

namespace nnuzoo {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

const char* dtype_name(DType dtype);
DType dtype_from_name(const std::string& name);

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);
Shape contiguous_strides(const Shape& shape);

class Tensor;

namespace detail {

struct TensorImpl {
  Shape shape;
  DType dtype = DType::f32;
  // monostate marks a meta tensor: shape only, no storage.
  std::variant<std::monostate, std::vector<float>, std::vector<double>> storage;
  bool requires_grad = false;
  std::shared_ptr<TensorImpl> grad;
  // Set when the tensor was produced by an op recorded on a tape.
  std::uint64_t tape_id = 0;
  std::int64_t tape_slot = -1;
};

}  // namespace detail

/// Dense row-major tensor with shared, reference-counted storage.
///
/// Copies alias the same buffer. Ops never mutate their inputs; the only
/// in-place writers are optimizers and explicit `mutable_data` callers.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, DType dtype = DType::f32);
  static Tensor ones(Shape shape, DType dtype = DType::f32);
  static Tensor full(Shape shape, double value, DType dtype = DType::f32);
  static Tensor scalar(double value, DType dtype = DType::f32);
  static Tensor from_vector(Shape shape, const std::vector<double>& values,
                            DType dtype = DType::f32);
  static Tensor from_floats(Shape shape, std::vector<float> values);
  static Tensor from_doubles(Shape shape, std::vector<double> values);
  /// Shape-only tensor without storage; used for parameter accounting.
  static Tensor meta(Shape shape, DType dtype = DType::f32);

  bool defined() const { return impl_ != nullptr; }
  bool is_meta() const;
  const Shape& shape() const;
  std::int64_t dim(int axis) const;
  int rank() const;
  std::int64_t numel() const;
  DType dtype() const;

  template <class T>
  std::span<const T> data() const;
  template <class T>
  std::span<T> mutable_data();

  double item() const;
  double at(std::int64_t flat_index) const;
  std::vector<double> to_vector() const;

  bool requires_grad() const;
  Tensor& set_requires_grad(bool flag);
  /// Gradient accumulated by the last backward pass; undefined if none.
  Tensor grad() const;
  void zero_grad();
  void set_grad(const Tensor& grad);

  Tensor clone() const;
  /// Same storage, no tape history.
  Tensor detach() const;
  Tensor to(DType dtype) const;

  /// Overwrite contents from another tensor of equal shape (any dtype).
  void copy_from(const Tensor& other);

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }
  detail::TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<detail::TensorImpl>& impl_ptr() const { return impl_; }

  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Calls `fn.template operator()<T>()` with T matching `dtype`.
template <class Fn>
decltype(auto) dispatch(DType dtype, Fn&& fn) {
  if (dtype == DType::f64) return fn.template operator()<double>();
  return fn.template operator()<float>();
}

template <class T>
constexpr DType dtype_of();
template <>
constexpr DType dtype_of<float>() {
  return DType::f32;
}
template <>
constexpr DType dtype_of<double>() {
  return DType::f64;
}

bool allclose(const Tensor& a, const Tensor& b, double rtol, double atol = 0.0);
/// max |a-b| / max(max|b|, tiny)
double max_rel_error(const Tensor& a, const Tensor& b);
bool bit_equal(const Tensor& a, const Tensor& b);

}  // namespace nnuzoo
