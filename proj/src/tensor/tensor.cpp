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

#include "nnuzoo/tensor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace nnuzoo {

const char* dtype_name(DType dtype) { return dtype == DType::f64 ? "f64" : "f32"; }

DType dtype_from_name(const std::string& name) {
  if (name == "f32") return DType::f32;
  if (name == "f64") return DType::f64;
  throw ValueError("unknown dtype '" + name + "'");
}

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

Shape contiguous_strides(const Shape& shape) {
  Shape strides(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * shape[i + 1];
  return strides;
}

namespace {

std::shared_ptr<detail::TensorImpl> make_impl(Shape shape, DType dtype, bool allocate) {
  for (auto d : shape)
    if (d < 0) throw ShapeError("negative dimension in shape " + shape_str(shape));
  auto impl = std::make_shared<detail::TensorImpl>();
  const auto n = static_cast<std::size_t>(shape_numel(shape));
  impl->shape = std::move(shape);
  impl->dtype = dtype;
  if (allocate) {
    if (dtype == DType::f64)
      impl->storage = std::vector<double>(n, 0.0);
    else
      impl->storage = std::vector<float>(n, 0.0f);
  }
  return impl;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, DType dtype) { return Tensor(make_impl(std::move(shape), dtype, true)); }

Tensor Tensor::ones(Shape shape, DType dtype) { return full(std::move(shape), 1.0, dtype); }

Tensor Tensor::full(Shape shape, double value, DType dtype) {
  Tensor t = zeros(std::move(shape), dtype);
  dispatch(dtype, [&]<class T>() {
    auto d = t.mutable_data<T>();
    std::fill(d.begin(), d.end(), static_cast<T>(value));
  });
  return t;
}

Tensor Tensor::scalar(double value, DType dtype) { return full({}, value, dtype); }

Tensor Tensor::from_vector(Shape shape, const std::vector<double>& values, DType dtype) {
  if (shape_numel(shape) != static_cast<std::int64_t>(values.size()))
    throw ShapeError("from_vector: shape " + shape_str(shape) + " needs " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  Tensor t = zeros(std::move(shape), dtype);
  dispatch(dtype, [&]<class T>() {
    auto d = t.mutable_data<T>();
    for (std::size_t i = 0; i < values.size(); ++i) d[i] = static_cast<T>(values[i]);
  });
  return t;
}

Tensor Tensor::from_floats(Shape shape, std::vector<float> values) {
  if (shape_numel(shape) != static_cast<std::int64_t>(values.size()))
    throw ShapeError("from_floats: size mismatch for shape " + shape_str(shape));
  auto impl = make_impl(std::move(shape), DType::f32, false);
  impl->storage = std::move(values);
  return Tensor(std::move(impl));
}

Tensor Tensor::from_doubles(Shape shape, std::vector<double> values) {
  if (shape_numel(shape) != static_cast<std::int64_t>(values.size()))
    throw ShapeError("from_doubles: size mismatch for shape " + shape_str(shape));
  auto impl = make_impl(std::move(shape), DType::f64, false);
  impl->storage = std::move(values);
  return Tensor(std::move(impl));
}

Tensor Tensor::meta(Shape shape, DType dtype) { return Tensor(make_impl(std::move(shape), dtype, false)); }

bool Tensor::is_meta() const {
  return std::holds_alternative<std::monostate>(impl_->storage);
}

const Shape& Tensor::shape() const { return impl_->shape; }

std::int64_t Tensor::dim(int axis) const {
  const int r = rank();
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r)
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape()));
  return impl_->shape[axis];
}

int Tensor::rank() const { return static_cast<int>(impl_->shape.size()); }

std::int64_t Tensor::numel() const { return shape_numel(impl_->shape); }

DType Tensor::dtype() const { return impl_->dtype; }

template <class T>
std::span<const T> Tensor::data() const {
  if (!impl_) throw ValueError("data() on undefined tensor");
  if (dtype() != dtype_of<T>())
    throw ShapeError(std::string("data(): tensor is ") + dtype_name(dtype()));
  if (is_meta()) throw ValueError("data() on meta tensor " + shape_str(shape()));
  const auto& v = std::get<std::vector<T>>(impl_->storage);
  return {v.data(), v.size()};
}

template <class T>
std::span<T> Tensor::mutable_data() {
  if (!impl_) throw ValueError("mutable_data() on undefined tensor");
  if (dtype() != dtype_of<T>())
    throw ShapeError(std::string("mutable_data(): tensor is ") + dtype_name(dtype()));
  if (is_meta()) throw ValueError("mutable_data() on meta tensor " + shape_str(shape()));
  auto& v = std::get<std::vector<T>>(impl_->storage);
  return {v.data(), v.size()};
}

template std::span<const float> Tensor::data<float>() const;
template std::span<const double> Tensor::data<double>() const;
template std::span<float> Tensor::mutable_data<float>();
template std::span<double> Tensor::mutable_data<double>();

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape()));
  return at(0);
}

double Tensor::at(std::int64_t i) const {
  return dispatch(dtype(), [&]<class T>() { return static_cast<double>(data<T>()[i]); });
}

std::vector<double> Tensor::to_vector() const {
  return dispatch(dtype(), [&]<class T>() {
    auto d = data<T>();
    return std::vector<double>(d.begin(), d.end());
  });
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool flag) {
  impl_->requires_grad = flag;
  return *this;
}

Tensor Tensor::grad() const {
  if (!impl_ || !impl_->grad) return Tensor();
  return Tensor(impl_->grad);
}

void Tensor::zero_grad() { impl_->grad.reset(); }

void Tensor::set_grad(const Tensor& grad) { impl_->grad = grad.impl_ptr(); }

Tensor Tensor::clone() const {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = impl_->shape;
  impl->dtype = impl_->dtype;
  impl->storage = impl_->storage;
  return Tensor(std::move(impl));
}

Tensor Tensor::detach() const {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = impl_->shape;
  impl->dtype = impl_->dtype;
  impl->storage = impl_->storage;
  return Tensor(std::move(impl));
}

Tensor Tensor::to(DType target) const {
  if (target == dtype()) return *this;
  Tensor out = zeros(shape(), target);
  out.copy_from(*this);
  return out;
}

void Tensor::copy_from(const Tensor& other) {
  if (other.shape() != shape())
    throw ShapeError("copy_from: " + shape_str(other.shape()) + " into " + shape_str(shape()));
  dispatch(dtype(), [&]<class T>() {
    auto dst = mutable_data<T>();
    dispatch(other.dtype(), [&]<class U>() {
      auto src = other.data<U>();
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<T>(src[i]);
    });
  });
}

double max_rel_error(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError("max_rel_error: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  const auto va = a.to_vector();
  const auto vb = b.to_vector();
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    diff = std::max(diff, std::abs(va[i] - vb[i]));
    scale = std::max(scale, std::abs(vb[i]));
  }
  if (scale == 0.0) return diff;
  return diff / scale;
}

bool allclose(const Tensor& a, const Tensor& b, double rtol, double atol) {
  if (a.shape() != b.shape()) return false;
  const auto va = a.to_vector();
  const auto vb = b.to_vector();
  for (std::size_t i = 0; i < va.size(); ++i)
    if (!(std::abs(va[i] - vb[i]) <= atol + rtol * std::abs(vb[i]))) return false;
  return true;
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape() || a.dtype() != b.dtype()) return false;
  return dispatch(a.dtype(), [&]<class T>() {
    auto x = a.data<T>();
    auto y = b.data<T>();
    return std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
  });
}

}  // namespace nnuzoo
