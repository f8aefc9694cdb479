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

// Helpers shared by the op implementations. Not installed.

#include <Eigen/Core>

#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "nnuzoo/tensor/tape.hpp"
#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::detail {

inline void require_same_dtype(const char* op, const Tensor& a, const Tensor& b) {
  if (a.dtype() != b.dtype())
    throw ShapeError(std::string(op) + ": dtype mismatch " + dtype_name(a.dtype()) + " vs " +
                     dtype_name(b.dtype()));
}

inline void require_defined(const char* op, const Tensor& t) {
  if (!t.defined()) throw ValueError(std::string(op) + ": undefined input");
  if (t.is_meta()) throw ValueError(std::string(op) + ": meta tensor has no data");
}

inline int normalize_axis(const char* op, int axis, int rank) {
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank)
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for rank " +
                     std::to_string(rank));
  return a;
}

#ifndef NDEBUG
void check_finite(const char* op, const Tensor& out);
#else
inline void check_finite(const char*, const Tensor&) {}
#endif

/// Records `out` on the active tape when any input is tracked. `make_fn` is
/// only invoked when recording happens.
template <class MakeFn>
void maybe_record(const char* op, std::initializer_list<Tensor> inputs, Tensor& out, MakeFn&& make_fn) {
  check_finite(op, out);
  Tape* tape = Tape::active();
  if (!tape) return;
  bool any = false;
  for (const auto& t : inputs) any = any || tape->tracks(t);
  if (!any) return;
  std::vector<Tensor> ins(inputs);
  tape->record(op, ins, out, make_fn());
}

template <class MakeFn>
void maybe_record_list(const char* op, const std::vector<Tensor>& inputs, Tensor& out, MakeFn&& make_fn) {
  check_finite(op, out);
  Tape* tape = Tape::active();
  if (!tape) return;
  bool any = false;
  for (const auto& t : inputs) any = any || tape->tracks(t);
  if (!any) return;
  tape->record(op, inputs, out, make_fn());
}

/// Row-major C[M,N] (+)= op(A) · op(B). A is [M,K] (or [K,M] when trans_a).
template <class T>
void gemm(bool trans_a, bool trans_b, std::int64_t M, std::int64_t N, std::int64_t K, const T* A,
          const T* B, T* C, bool accumulate) {
  using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat> c(C, M, N);
  if (K == 0) {
    if (!accumulate) c.setZero();
    return;
  }
  Eigen::Map<const RowMat> a(A, trans_a ? K : M, trans_a ? M : K);
  Eigen::Map<const RowMat> b(B, trans_b ? N : K, trans_b ? K : N);
  if (trans_a && trans_b) {
    if (accumulate) c.noalias() += a.transpose() * b.transpose();
    else c.noalias() = a.transpose() * b.transpose();
  } else if (trans_a) {
    if (accumulate) c.noalias() += a.transpose() * b;
    else c.noalias() = a.transpose() * b;
  } else if (trans_b) {
    if (accumulate) c.noalias() += a * b.transpose();
    else c.noalias() = a * b.transpose();
  } else {
    if (accumulate) c.noalias() += a * b;
    else c.noalias() = a * b;
  }
}

/// Offset tables that split a tensor into reduction groups: element
/// (group i, member j) lives at outer[i] + inner[j].
struct ReducePlan {
  std::vector<std::int64_t> outer;
  std::vector<std::int64_t> inner;
  Shape keep_shape;  // reduced axes set to 1
  Shape out_shape;   // reduced axes removed
};

ReducePlan make_reduce_plan(const Shape& shape, const std::vector<int>& axes);

/// Broadcasts `t` to `shape` (not recorded).
Tensor expand_to(const Tensor& t, const Shape& shape);

}  // namespace nnuzoo::detail
