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

#include <cmath>

#include "nnuzoo/tensor/ops.hpp"
#include "nnuzoo/tensor/primitive.hpp"
#include "nnuzoo/tensor/tensor.hpp"
#include "../support/oracles.hpp"

namespace nnuzoo {
namespace {

using testing::random_tensor;

TEST(Tensor, FactoriesAndShape) {
  auto t = Tensor::zeros({2, 3});
  EXPECT_EQ(t.rank(), 2);
  EXPECT_EQ(t.numel(), 6);
  EXPECT_EQ(t.dtype(), DType::f32);
  auto o = Tensor::ones({4}, DType::f64);
  EXPECT_DOUBLE_EQ(o.at(3), 1.0);
  auto m = Tensor::meta({10, 10});
  EXPECT_TRUE(m.is_meta());
  EXPECT_EQ(m.numel(), 100);
  EXPECT_THROW(Tensor::from_vector({2, 2}, {1, 2, 3}), ShapeError);
}

TEST(Tensor, CloneIsIndependent) {
  auto a = Tensor::from_vector({3}, {1, 2, 3});
  auto b = a.clone();
  b.mutable_data<float>()[0] = 9.0f;
  EXPECT_DOUBLE_EQ(a.at(0), 1.0);
}

TEST(Ops, SoftmaxOfZerosIsUniform) {
  auto y = ops::softmax(Tensor::zeros({2}), -1);
  EXPECT_DOUBLE_EQ(y.at(0), 0.5);
  EXPECT_DOUBLE_EQ(y.at(1), 0.5);
}

TEST(Ops, SoftmaxLargeLogitsStable) {
  auto y = ops::softmax(Tensor::from_vector({3}, {1000, 1000, -1000}, DType::f64), 0);
  EXPECT_NEAR(y.at(0), 0.5, 1e-12);
  EXPECT_NEAR(y.at(2), 0.0, 1e-12);
}

TEST(Ops, SumOfOnes) {
  EXPECT_DOUBLE_EQ(ops::sum(Tensor::ones({2, 3})).item(), 6.0);
  auto rows = ops::sum(Tensor::ones({2, 3}), {1});
  EXPECT_EQ(rows.shape(), (Shape{2}));
  EXPECT_DOUBLE_EQ(rows.at(1), 3.0);
  auto keep = ops::mean(Tensor::ones({2, 3}), {0}, true);
  EXPECT_EQ(keep.shape(), (Shape{1, 3}));
}

TEST(Ops, ActivationsMatchScalarLoops) {
  auto x = random_tensor({64}, 3, DType::f64, -4, 4);
  auto xv = x.to_vector();
  auto g = ops::gelu(x).to_vector();
  auto s = ops::silu(x).to_vector();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    EXPECT_NEAR(g[i], testing::gelu_ref(xv[i]), 1e-6 * std::max(1.0, std::abs(g[i])));
    EXPECT_NEAR(s[i], testing::silu_ref(xv[i]), 1e-6 * std::max(1.0, std::abs(s[i])));
  }
}

TEST(Ops, LayerNormMatchesScalarLoop) {
  auto x = random_tensor({5, 12}, 4, DType::f64, -3, 3);
  auto y = ops::layer_norm(x, {-1});
  auto ref = Tensor::from_vector({5, 12}, testing::layer_norm_rows_ref(x.to_vector(), 5, 12, 1e-5), DType::f64);
  EXPECT_LT(max_rel_error(y, ref), 1e-6);
}

TEST(Ops, MatmulBatchedBroadcast) {
  auto a = random_tensor({2, 3, 4}, 1);
  auto b = random_tensor({4, 5}, 2);
  auto c = ops::matmul(a, b);
  EXPECT_EQ(c.shape(), (Shape{2, 3, 5}));
  double ref = 0;
  for (int k = 0; k < 4; ++k) ref += a.at(1 * 12 + 2 * 4 + k) * b.at(k * 5 + 3);
  EXPECT_NEAR(c.at(1 * 15 + 2 * 5 + 3), ref, 1e-12);
  EXPECT_THROW(ops::matmul(a, random_tensor({3, 5}, 2)), ShapeError);
}

TEST(Ops, BroadcastAddAndShapeErrors) {
  auto a = Tensor::ones({2, 3});
  auto b = Tensor::from_vector({3}, {1, 2, 3});
  auto c = ops::add(a, b);
  EXPECT_DOUBLE_EQ(c.at(5), 4.0);
  EXPECT_THROW(ops::add(a, Tensor::ones({4})), ShapeError);
  EXPECT_THROW(ops::add(a, Tensor::ones({2, 3}, DType::f64)), ShapeError);
}

TEST(Ops, ConcatSlicePadRoundTrip) {
  auto a = random_tensor({2, 3, 4}, 5);
  auto b = random_tensor({2, 2, 4}, 6);
  auto c = ops::concat({a, b}, 1);
  EXPECT_EQ(c.shape(), (Shape{2, 5, 4}));
  EXPECT_TRUE(bit_equal(ops::slice(c, 1, 3, 5), b));
  auto p = ops::pad(a, {{0, 0}, {1, 2}, {0, 0}});
  EXPECT_EQ(p.shape(), (Shape{2, 6, 4}));
  EXPECT_TRUE(bit_equal(ops::slice(p, 1, 1, 4), a));
}

TEST(Ops, ReshapePermute) {
  auto x = random_tensor({2, 3, 4}, 8);
  auto r = ops::reshape(x, {-1, 4});
  EXPECT_EQ(r.shape(), (Shape{6, 4}));
  auto p = ops::permute(x, {2, 0, 1});
  EXPECT_EQ(p.shape(), (Shape{4, 2, 3}));
  EXPECT_DOUBLE_EQ(p.at(3 * 6 + 1 * 3 + 2), x.at(1 * 12 + 2 * 4 + 3));
  EXPECT_TRUE(bit_equal(ops::permute(p, {1, 2, 0}), x));
  EXPECT_THROW(ops::reshape(x, {5, 5}), ShapeError);
}

TEST(Ops, SpaceToDepthInverse) {
  auto x = random_tensor({1, 3, 4, 6}, 9);
  auto s = ops::space_to_depth(x, 2);
  EXPECT_EQ(s.shape(), (Shape{1, 12, 2, 3}));
  EXPECT_TRUE(bit_equal(ops::depth_to_space(s, 2), x));
}

TEST(Ops, UpsampleAndPool) {
  auto x = Tensor::from_vector({1, 1, 2, 2}, {1, 2, 3, 4});
  auto n = ops::upsample2d(x, 2, ops::UpsampleMode::nearest);
  EXPECT_EQ(n.shape(), (Shape{1, 1, 4, 4}));
  EXPECT_DOUBLE_EQ(n.at(5), 1.0);
  EXPECT_DOUBLE_EQ(n.at(15), 4.0);
  auto b = ops::upsample2d(x, 2, ops::UpsampleMode::bilinear);
  // Half-pixel centers: the second output column sits 1/4 of the way to the next input.
  EXPECT_NEAR(b.at(1), 1.25, 1e-6);
  auto m = ops::max_pool2d(n, 2, 2);
  EXPECT_TRUE(bit_equal(m, x));
}

TEST(Ops, InstanceNormZeroMeanUnitVar) {
  auto x = random_tensor({2, 3, 5, 5}, 10, DType::f64, 0, 5);
  auto y = ops::instance_norm(x);
  auto mu = ops::mean(y, {2, 3});
  for (double v : mu.to_vector()) EXPECT_NEAR(v, 0.0, 1e-12);
  auto var = ops::mean(ops::mul(y, y), {2, 3});
  for (double v : var.to_vector()) EXPECT_NEAR(v, 1.0, 1e-3);
}

TEST(Ops, DropoutDeterministicAndIdentityAtEval) {
  auto x = Tensor::ones({1000});
  EXPECT_TRUE(bit_equal(ops::dropout(x, 0.5, false, 1), x));
  auto a = ops::dropout(x, 0.5, true, 42);
  auto b = ops::dropout(x, 0.5, true, 42);
  EXPECT_TRUE(bit_equal(a, b));
  int kept = 0;
  for (double v : a.to_vector()) {
    if (v != 0.0) {
      EXPECT_DOUBLE_EQ(v, 2.0);
      ++kept;
    }
  }
  EXPECT_GT(kept, 400);
  EXPECT_LT(kept, 600);
}

TEST(Primitive, DispatchesByName) {
  auto y = apply_primitive("softmax", {Tensor::zeros({2})}, Attrs().set("axis", std::int64_t{0}));
  EXPECT_DOUBLE_EQ(y.at(0), 0.5);
  auto s = apply_primitive("sum", {Tensor::ones({2, 3})}, {});
  EXPECT_DOUBLE_EQ(s.item(), 6.0);
}

TEST(Primitive, UnknownIdRejected) {
  try {
    apply_primitive("frobnicate", {Tensor::ones({1})}, {});
    FAIL();
  } catch (const ValueError& e) {
    EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
  }
}

TEST(Primitive, CatalogCoversCoreOps) {
  auto names = primitive_names();
  for (const char* op : {"add", "sub", "mul", "div", "matmul", "exp", "log", "neg", "sum", "mean", "softmax",
                         "sigmoid", "relu", "leaky_relu", "gelu", "silu", "concat", "slice", "reshape", "permute",
                         "pad", "upsample_nearest", "upsample_bilinear", "max_pool2d", "layer_norm",
                         "instance_norm", "dropout", "conv2d", "conv_transpose2d"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), op), names.end()) << op;
  }
}

}  // namespace
}  // namespace nnuzoo
