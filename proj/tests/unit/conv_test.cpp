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

#include "nnuzoo/tensor/ops.hpp"
#include "nnuzoo/tensor/parallel.hpp"
#include "../support/oracles.hpp"

namespace nnuzoo {
namespace {

using testing::random_tensor;

Tensor run_oracle(const Tensor& x, const Tensor& w, const Tensor* b, int stride, int pad, int dil, int groups) {
  Shape os;
  auto bv = b ? b->to_vector() : std::vector<double>{};
  auto y = testing::conv2d_oracle(x.to_vector(), x.shape(), w.to_vector(), w.shape(), b ? &bv : nullptr, stride, pad,
                                  dil, groups, &os);
  return Tensor::from_vector(os, y, DType::f64);
}

TEST(Conv2d, OnesKernelSumsNeighbourhood) {
  auto y = ops::conv2d(Tensor::ones({1, 1, 3, 3}), Tensor::ones({1, 1, 3, 3}), std::nullopt, 1, 0);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(y.item(), 9.0);
}

TEST(Conv2d, DeltaKernelIsIdentity) {
  auto x = random_tensor({2, 1, 5, 6}, 1, DType::f32);
  auto w = Tensor::zeros({1, 1, 3, 3});
  w.mutable_data<float>()[4] = 1.0f;
  EXPECT_TRUE(bit_equal(ops::conv2d(x, w, std::nullopt, 1, 1), x));
}

TEST(Conv2d, MatchesNestedLoopOracle) {
  struct P {
    int stride, pad, dil, groups;
    Shape xs, ws;
  };
  for (const P& p : {P{2, 1, 2, 2, {2, 4, 9, 8}, {6, 2, 3, 3}}, P{1, 0, 1, 1, {1, 3, 5, 5}, {4, 3, 3, 3}},
                     P{1, 1, 1, 4, {2, 4, 6, 6}, {4, 1, 3, 3}}, P{1, 0, 1, 1, {2, 5, 4, 3}, {7, 5, 1, 1}},
                     P{3, 2, 1, 1, {1, 2, 7, 9}, {3, 2, 5, 4}}}) {
    auto x = random_tensor(p.xs, 11, DType::f64);
    auto w = random_tensor(p.ws, 12, DType::f64);
    auto b = random_tensor({p.ws[0]}, 13, DType::f64);
    auto y = ops::conv2d(x, w, b, p.stride, p.pad, p.dil, p.groups);
    auto ref = run_oracle(x, w, &b, p.stride, p.pad, p.dil, p.groups);
    ASSERT_EQ(y.shape(), ref.shape());
    EXPECT_LT(max_rel_error(y, ref), 1e-6);
  }
}

TEST(Conv2d, ShapeErrors) {
  EXPECT_THROW(ops::conv2d(Tensor::ones({1, 3, 4, 4}), Tensor::ones({2, 2, 3, 3}), std::nullopt, 1, 0), ShapeError);
  EXPECT_THROW(ops::conv2d(Tensor::ones({1, 3, 4, 4}), Tensor::ones({2, 1, 3, 3}), std::nullopt, 1, 0, 1, 2),
               ShapeError);
  EXPECT_THROW(ops::conv2d(Tensor::ones({1, 1, 2, 2}), Tensor::ones({1, 1, 3, 3}), std::nullopt, 1, 0), ShapeError);
}

TEST(ConvTranspose2d, SinglePixelStride2) {
  auto y = ops::conv_transpose2d(Tensor::ones({1, 1, 1, 1}), Tensor::ones({1, 1, 2, 2}), std::nullopt, 2, 0);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 2, 2}));
  for (double v : y.to_vector()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(ConvTranspose2d, MatchesScatterOracle) {
  auto x = random_tensor({2, 3, 4, 5}, 21, DType::f64);
  auto w = random_tensor({3, 2, 3, 3}, 22, DType::f64);
  auto b = random_tensor({2}, 23, DType::f64);
  auto y = ops::conv_transpose2d(x, w, b, 2, 1);
  Shape os;
  auto bv = b.to_vector();
  auto ref = testing::conv_transpose2d_oracle(x.to_vector(), x.shape(), w.to_vector(), w.shape(), &bv, 2, 1, &os);
  ASSERT_EQ(y.shape(), os);
  EXPECT_LT(max_rel_error(y, Tensor::from_vector(os, ref, DType::f64)), 1e-6);
}

TEST(ConvTranspose2d, AdjointOfConv) {
  // <conv(x), y> == <x, conv_transpose(y)> with the weight reinterpreted.
  auto x = random_tensor({2, 3, 7, 7}, 31, DType::f64);
  auto w = random_tensor({4, 3, 3, 3}, 32, DType::f64);
  auto cx = ops::conv2d(x, w, std::nullopt, 2, 1);
  auto y = random_tensor(cx.shape(), 33, DType::f64);
  auto ty = ops::conv_transpose2d(y, w, std::nullopt, 2, 1);
  ASSERT_EQ(ty.shape(), x.shape());
  const double lhs = testing::dot(cx, y);
  const double rhs = testing::dot(x, ty);
  EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(lhs) + 1e-12);
}

TEST(Conv2d, ThreadCountDoesNotChangeResults) {
  auto x = random_tensor({4, 3, 9, 9}, 41, DType::f32);
  auto w = random_tensor({5, 3, 3, 3}, 42, DType::f32);
  const int before = num_threads();
  set_num_threads(1);
  auto a = ops::conv2d(x, w, std::nullopt, 1, 1);
  set_num_threads(3);
  auto b = ops::conv2d(x, w, std::nullopt, 1, 1);
  set_num_threads(before);
  EXPECT_TRUE(bit_equal(a, b));
}

}  // namespace
}  // namespace nnuzoo
