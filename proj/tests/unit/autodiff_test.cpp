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

#include <functional>
#include <set>

#include "nnuzoo/tensor/ops.hpp"
#include "nnuzoo/tensor/primitive.hpp"
#include "nnuzoo/tensor/tape.hpp"
#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"

namespace nnuzoo {
namespace {

using testing::gradcheck;
using testing::random_tensor;
using Fn = std::function<Tensor(const std::vector<Tensor>&)>;

constexpr double kTol = 1e-4;

TEST(Autodiff, SumOfSquaresGradient) {
  auto x = Tensor::from_vector({3}, {1, 2, 3}, DType::f64);
  x.set_requires_grad(true);
  Tape tape;
  Tape::Scope scope(tape);
  auto loss = ops::sum(ops::mul(x, x));
  auto grads = tape.backward(loss);
  EXPECT_EQ(grads[x].to_vector(), (std::vector<double>{2, 4, 6}));
  EXPECT_EQ(x.grad().to_vector(), (std::vector<double>{2, 4, 6}));
}

TEST(Autodiff, GradientsAccumulateAcrossUses) {
  auto x = Tensor::from_vector({2}, {1, -1}, DType::f64);
  x.set_requires_grad(true);
  Tape tape;
  Tape::Scope scope(tape);
  auto loss = ops::sum(ops::add(ops::mul_scalar(x, 3.0), ops::mul(x, x)));
  tape.backward(loss);
  EXPECT_EQ(x.grad().to_vector(), (std::vector<double>{5, 1}));
}

TEST(Autodiff, NonScalarLossRejected) {
  auto x = Tensor::ones({3}, DType::f64);
  x.set_requires_grad(true);
  Tape tape;
  Tape::Scope scope(tape);
  auto y = ops::mul(x, x);
  EXPECT_THROW(tape.backward(y), ShapeError);
}

TEST(Autodiff, NothingRecordedWithoutTrackedInputs) {
  Tape tape;
  Tape::Scope scope(tape);
  auto y = ops::exp(Tensor::ones({3}));
  EXPECT_TRUE(tape.nodes().empty());
  EXPECT_FALSE(tape.on_tape(y));
}

TEST(Autodiff, PauseSuspendsRecording) {
  auto x = Tensor::ones({3}, DType::f64);
  x.set_requires_grad(true);
  Tape tape;
  Tape::Scope scope(tape);
  {
    Tape::Pause pause;
    ops::exp(x);
  }
  EXPECT_TRUE(tape.nodes().empty());
}

struct Case {
  std::string name;
  Fn fn;
  std::vector<Tensor> inputs;
};

std::vector<Case> primitive_cases() {
  auto r = [](Shape s, std::uint64_t seed, double lo = -1, double hi = 1) {
    return random_tensor(std::move(s), seed, DType::f64, lo, hi);
  };
  std::vector<Case> cs;
  auto bin = [&](const std::string& op) {
    cs.push_back({op, [op](const std::vector<Tensor>& in) { return apply_primitive(op, in, {}); },
                  {r({2, 3}, 1), r({3}, 2, 0.5, 1.5)}});
  };
  for (const char* op : {"add", "sub", "mul", "div"}) bin(op);
  cs.push_back({"matmul", [](auto& in) { return ops::matmul(in[0], in[1]); }, {r({2, 3, 4}, 3), r({2, 4, 2}, 4)}});
  cs.push_back({"matmul_shared", [](auto& in) { return ops::matmul(in[0], in[1]); }, {r({2, 3, 4}, 3), r({4, 2}, 4)}});
  for (const char* op : {"exp", "neg", "sigmoid", "gelu", "silu", "softplus"})
    cs.push_back({op, [op = std::string(op)](auto& in) { return apply_primitive(op, in, {}); }, {r({7}, 5, -2, 2)}});
  cs.push_back({"log", [](auto& in) { return ops::log(in[0]); }, {r({7}, 6, 0.5, 2)}});
  // Kinks are kept away from the probe points.
  cs.push_back({"relu", [](auto& in) { return ops::relu(in[0]); },
                {Tensor::from_vector({4}, {-1.0, -0.3, 0.4, 2.0}, DType::f64)}});
  cs.push_back({"leaky_relu", [](auto& in) { return ops::leaky_relu(in[0], 0.01); },
                {Tensor::from_vector({4}, {-1.0, -0.3, 0.4, 2.0}, DType::f64)}});
  cs.push_back({"sum", [](auto& in) { return ops::sum(in[0], {1}); }, {r({2, 3, 4}, 7)}});
  cs.push_back({"mean", [](auto& in) { return ops::mean(in[0], {0, 2}, true); }, {r({2, 3, 4}, 8)}});
  cs.push_back({"softmax", [](auto& in) { return ops::softmax(in[0], 1); }, {r({2, 5, 3}, 9)}});
  cs.push_back({"log_softmax", [](auto& in) { return ops::log_softmax(in[0], -1); }, {r({3, 4}, 10)}});
  cs.push_back({"concat", [](auto& in) { return ops::concat({in[0], in[1]}, 1); }, {r({2, 2, 3}, 11), r({2, 1, 3}, 12)}});
  cs.push_back({"slice", [](auto& in) { return ops::slice(in[0], 2, 1, 3); }, {r({2, 2, 4}, 13)}});
  cs.push_back({"reshape", [](auto& in) { return ops::reshape(in[0], {4, -1}); }, {r({2, 2, 3}, 14)}});
  cs.push_back({"permute", [](auto& in) { return ops::permute(in[0], {2, 0, 1}); }, {r({2, 3, 4}, 15)}});
  cs.push_back({"pad", [](auto& in) { return ops::pad(in[0], {{0, 0}, {1, 2}}, 0.5); }, {r({2, 3}, 16)}});
  cs.push_back({"index_select", [](auto& in) { return ops::index_select(in[0], 1, {2, 0, 2}); }, {r({2, 3}, 17)}});
  cs.push_back({"upsample_nearest", [](auto& in) { return ops::upsample2d(in[0], 2, ops::UpsampleMode::nearest); },
                {r({1, 2, 3, 3}, 18)}});
  cs.push_back({"upsample_bilinear", [](auto& in) { return ops::upsample2d(in[0], 2, ops::UpsampleMode::bilinear); },
                {r({1, 2, 3, 4}, 19)}});
  cs.push_back({"max_pool2d", [](auto& in) { return ops::max_pool2d(in[0], 2, 2); }, {r({1, 2, 4, 4}, 20)}});
  cs.push_back({"layer_norm", [](auto& in) { return ops::layer_norm(in[0], {-1}); }, {r({3, 6}, 21)}});
  cs.push_back({"instance_norm", [](auto& in) { return ops::instance_norm(in[0]); }, {r({2, 2, 3, 3}, 22)}});
  cs.push_back({"dropout", [](auto& in) { return ops::dropout(in[0], 0.3, true, 5); }, {r({20}, 23)}});
  cs.push_back({"conv2d", [](auto& in) { return ops::conv2d(in[0], in[1], in[2], 2, 1, 2, 2); },
                {r({2, 4, 7, 6}, 24), r({6, 2, 3, 3}, 25), r({6}, 26)}});
  cs.push_back({"conv2d_depthwise", [](auto& in) { return ops::conv2d(in[0], in[1], in[2], 1, 1, 1, 3); },
                {r({2, 3, 5, 5}, 27), r({3, 1, 3, 3}, 28), r({3}, 29)}});
  cs.push_back({"conv2d_pointwise", [](auto& in) { return ops::conv2d(in[0], in[1], in[2], 1, 0); },
                {r({2, 3, 4, 4}, 30), r({5, 3, 1, 1}, 31), r({5}, 32)}});
  cs.push_back({"conv_transpose2d", [](auto& in) { return ops::conv_transpose2d(in[0], in[1], in[2], 2, 1); },
                {r({2, 3, 3, 4}, 33), r({3, 2, 4, 4}, 34), r({2}, 35)}});
  cs.push_back({"space_to_depth", [](auto& in) { return ops::space_to_depth(in[0], 2); }, {r({1, 2, 4, 4}, 36)}});
  cs.push_back({"depth_to_space", [](auto& in) { return ops::depth_to_space(in[0], 2); }, {r({1, 8, 2, 3}, 37)}});
  return cs;
}

TEST(Autodiff, FiniteDifferenceEveryPrimitive) {
  for (auto& c : primitive_cases()) {
    auto res = gradcheck(c.fn, c.inputs, 11);
    EXPECT_LT(res.max_rel_error, kTol) << c.name << " worst " << res.worst;
  }
}

Tensor composite(const std::vector<Tensor>& in) {
  // x: 1×2×6×6, w: 4×2×3×3, g: 4
  auto h = ops::conv2d(in[0], in[1], std::nullopt, 1, 1);
  h = ops::instance_norm(h);
  h = ops::gelu(h);
  h = ops::max_pool2d(h, 2, 2);
  h = ops::upsample2d(h, 2, ops::UpsampleMode::bilinear);
  h = ops::permute(h, {0, 2, 3, 1});
  h = ops::layer_norm(h, {-1});
  h = ops::mul(h, in[2]);
  h = ops::silu(h);
  h = ops::reshape(h, {36, 4});
  h = ops::softmax(h, -1);
  h = ops::concat({h, ops::exp(ops::slice(h, 1, 0, 2))}, 1);
  h = ops::log(ops::add_scalar(h, 1.0));
  return ops::mean(h, {0});
}

TEST(Autodiff, CompositeGraphGradcheck) {
  std::vector<Tensor> in{random_tensor({1, 2, 6, 6}, 40, DType::f64), random_tensor({4, 2, 3, 3}, 41, DType::f64),
                         random_tensor({4}, 42, DType::f64, 0.5, 1.5)};
  Tape tape;
  {
    Tape::Scope scope(tape);
    for (auto& t : in) t.set_requires_grad(true);
    auto out = composite(in);
    std::set<std::string> kinds;
    for (const auto& n : tape.nodes()) kinds.insert(n.op);
    EXPECT_GE(tape.nodes().size(), 10u);
    EXPECT_GE(kinds.size(), 8u);
    tape.clear();
    for (auto& t : in) t.set_requires_grad(false);
  }
  auto res = gradcheck(composite, in, 3);
  EXPECT_LT(res.max_rel_error, kTol) << res.worst;
}

TEST(Autodiff, BackwardBitReproducible) {
  auto run = [] {
    std::vector<Tensor> in{random_tensor({1, 2, 6, 6}, 40, DType::f32), random_tensor({4, 2, 3, 3}, 41, DType::f32),
                           random_tensor({4}, 42, DType::f32, 0.5, 1.5)};
    for (auto& t : in) t.set_requires_grad(true);
    Tape tape;
    Tape::Scope scope(tape);
    auto loss = ops::sum(composite(in));
    tape.backward(loss);
    return std::make_pair(loss, in[1].grad());
  };
  auto [l1, g1] = run();
  auto [l2, g2] = run();
  EXPECT_TRUE(bit_equal(l1, l2));
  EXPECT_TRUE(bit_equal(g1, g2));
}

}  // namespace
}  // namespace nnuzoo
