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

#include "nnuzoo/blocks/ublock.hpp"
#include "nnuzoo/tensor/tape.hpp"
#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"

namespace nnuzoo {
namespace {

using kernels::Traversal;
using testing::random_tensor;

const BlockKind kAllKinds[] = {BlockKind::RSU,    BlockKind::RSU_F,    BlockKind::UNETR_B,  BlockKind::SWT_B,
                               BlockKind::SS2D_B, BlockKind::ALT1DM_B, BlockKind::MAMBAND_B};

UBlockSpec tiny_spec(BlockKind kind, std::int64_t in = 3, std::int64_t mid = 4, std::int64_t out = 6) {
  UBlockSpec s;
  s.kind = kind;
  s.in_ch = in;
  s.mid_ch = mid;
  s.out_ch = out;
  s.depth = 2;
  s.scale_schedule = default_schedule(kind, 2);
  s.attrs.set("layers", std::int64_t{2}).set("head_dim", std::int64_t{4}).set("state", std::int64_t{4});
  s.attrs.set("window", std::int64_t{4}).set("embed", std::int64_t{8}).set("mlp_ratio", 2.0);
  return s;
}

std::int64_t conv_norm_act(std::int64_t in, std::int64_t out) { return in * out * 9 + out + 2 * out; }

TEST(UBlock, RsuShapeContract) {
  UBlockSpec s;
  s.kind = BlockKind::RSU;
  s.in_ch = 3;
  s.mid_ch = 16;
  s.out_ch = 64;
  s.depth = 4;
  s.scale_schedule = default_schedule(BlockKind::RSU, 4);
  ParamInit init(1);
  auto block = build_ublock(s, init);
  auto y = block->forward(random_tensor({1, 3, 64, 64}, 2, DType::f32));
  EXPECT_EQ(y.shape(), (Shape{1, 64, 64, 64}));
}

TEST(UBlock, RsuParamsMatchClosedForm) {
  for (auto kind : {BlockKind::RSU, BlockKind::RSU_F}) {
    UBlockSpec s{kind, 3, 16, 64, 4, default_schedule(kind, 4), {}, 0};
    ParamInit init(1, DType::f32, false);
    // in conv, enc1 (out→mid), enc2..4 (mid→mid), dec3, dec2 (2mid→mid), dec1 (2mid→out)
    const std::int64_t expected = conv_norm_act(3, 64) + conv_norm_act(64, 16) + 3 * conv_norm_act(16, 16) +
                                  2 * conv_norm_act(32, 16) + conv_norm_act(32, 64);
    EXPECT_EQ(build_ublock(s, init)->count_params(), expected) << block_kind_name(kind);
  }
}

// Independent walk over the module tree that sums leaf tensor sizes.
std::int64_t walk(const Module& m) {
  std::int64_t n = 0;
  for (const auto& [name, t] : m.named_parameters())
    if (name.find('.') == std::string::npos) n += shape_numel(t.shape());
  for (const auto& [_, child] : m.children()) n += walk(*child);
  return n;
}

TEST(UBlock, ParamCountEqualsLeafWalk) {
  for (auto kind : kAllKinds) {
    ParamInit init(3, DType::f32, false);
    auto b = build_ublock(tiny_spec(kind), init);
    EXPECT_EQ(b->count_params(), walk(*b)) << block_kind_name(kind);
    EXPECT_GT(b->count_params(), 0);
  }
}

TEST(UBlock, Ss2dSingleLevelParamsMatchClosedForm) {
  // depth 1, scale 1, one layer, C = mid = 8, E = 16, N = 4, R = 1.
  UBlockSpec s{BlockKind::SS2D_B, 8, 8, 8, 1, {1}, {}, 0};
  s.attrs.set("layers", std::int64_t{1}).set("state", std::int64_t{4});
  ParamInit init(1, DType::f32, false);
  const std::int64_t C = 8, E = 16, N = 4, R = 1;
  const std::int64_t scan = E * (R + 2 * N) + R * E + E + E * N + E;
  const std::int64_t vss = 2 * C + C * 2 * E + (E * 9 + E) + 4 * scan + 2 * E + E * C;
  const std::int64_t expected = C * C /*stem*/ + vss + C * C /*head*/ + (C * 9 + C * C) /*adapter*/;
  EXPECT_EQ(build_ublock(s, init)->count_params(), expected);
}

TEST(UBlock, AlternatingTraversalByBlockIndex) {
  const Traversal expected[] = {Traversal::row_forward, Traversal::col_forward, Traversal::row_backward,
                                Traversal::col_backward, Traversal::row_forward};
  for (int i = 0; i < 5; ++i) {
    auto s = tiny_spec(BlockKind::ALT1DM_B);
    s.traversal_seed = i;
    ParamInit init(1, DType::f32, false);
    auto orders = build_ublock(s, init)->traversals();
    ASSERT_FALSE(orders.empty());
    for (auto o : orders) EXPECT_EQ(o, expected[i]) << "block " << i;
  }
}

TEST(UBlock, NdTraversalCyclesAcrossLayers) {
  auto s = tiny_spec(BlockKind::MAMBAND_B);
  s.traversal_seed = 1;
  ParamInit init(1, DType::f32, false);
  auto orders = build_ublock(s, init)->traversals();
  ASSERT_EQ(orders.size(), 6u);  // 2 encoder levels + 1 decoder level, 2 layers each
  for (std::size_t j = 0; j < orders.size(); ++j) EXPECT_EQ(orders[j], nd_order(1, static_cast<int>(j)));
  EXPECT_EQ(nd_order(0, 0), Traversal::row_forward);
  EXPECT_EQ(nd_order(0, 1), Traversal::row_backward);
  EXPECT_EQ(nd_order(0, 2), Traversal::col_forward);
  EXPECT_EQ(nd_order(0, 3), Traversal::col_backward);
}

TEST(UBlock, EveryKindPreservesResolution) {
  for (auto kind : kAllKinds)
    for (const Shape& shape : {Shape{2, 3, 8, 8}, Shape{1, 3, 16, 12}}) {
      ParamInit init(4);
      auto b = build_ublock(tiny_spec(kind), init);
      auto y = b->forward(random_tensor(shape, 5, DType::f32));
      EXPECT_EQ(y.shape(), (Shape{shape[0], 6, shape[2], shape[3]})) << block_kind_name(kind);
    }
}

TEST(UBlock, IndivisibleInputRejected) {
  ParamInit init(4);
  auto b = build_ublock(tiny_spec(BlockKind::SS2D_B), init);
  EXPECT_THROW(b->forward(random_tensor({1, 3, 6, 8}, 5)), ShapeError);
}

TEST(UBlock, UnetrPadsIndivisibleInput) {
  ParamInit init(4);
  auto b = build_ublock(tiny_spec(BlockKind::UNETR_B), init);
  auto y = b->forward(random_tensor({1, 3, 8, 7}, 5, DType::f32));
  EXPECT_EQ(y.shape(), (Shape{1, 6, 8, 7}));
}

TEST(UBlock, SpecValidation) {
  auto s = tiny_spec(BlockKind::SWT_B);
  s.scale_schedule = {2};
  EXPECT_THROW(s.validate(), ValueError);
  s = tiny_spec(BlockKind::RSU);
  s.depth = 1;
  s.scale_schedule = {1};
  EXPECT_THROW(s.validate(), ValueError);
  s = tiny_spec(BlockKind::SS2D_B);
  s.mid_ch = 0;
  EXPECT_THROW(s.validate(), ValueError);
}

TEST(UBlock, DoublingMidIncreasesParams) {
  for (auto kind : kAllKinds) {
    ParamInit a(1, DType::f32, false), b(1, DType::f32, false);
    auto s1 = tiny_spec(kind, 3, 4, 6);
    auto s2 = tiny_spec(kind, 3, 8, 6);
    EXPECT_LT(build_ublock(s1, a)->count_params(), build_ublock(s2, b)->count_params()) << block_kind_name(kind);
  }
}

TEST(UBlock, GradcheckEveryKind) {
  for (auto kind : kAllKinds) {
    ParamInit init(11, DType::f64);
    auto block = build_ublock(tiny_spec(kind), init);
    std::vector<Tensor> inputs{random_tensor({1, 3, 8, 8}, 12, DType::f64)};
    for (auto& p : block->parameters()) inputs.push_back(p);
    auto* raw = block.get();
    auto fn = [raw](const std::vector<Tensor>& in) { return raw->forward(in[0]); };
    auto res = testing::gradcheck(fn, inputs, 13, 1e-5, 6);
    EXPECT_LT(res.max_rel_error, 1e-4) << block_kind_name(kind) << " " << res.worst;
  }
}

TEST(ResidualAdapter, IdentityInitIsPlainResidual) {
  ParamInit init(1, DType::f64);
  ResidualAdapter adapter(init, 5, 5);
  auto x = random_tensor({2, 5, 6, 6}, 1, DType::f64);
  auto y = random_tensor({2, 5, 6, 6}, 2, DType::f64);
  EXPECT_LT(max_rel_error(adapter.forward(x, y), ops::add(y, x)), 1e-15);
}

TEST(ResidualAdapter, ZeroBlockOutputGivesAdapterOnly) {
  ParamInit init(1, DType::f64);
  ResidualAdapter adapter(init, 3, 5);
  auto x = random_tensor({1, 3, 4, 4}, 3, DType::f64);
  auto zero = Tensor::zeros({1, 5, 4, 4}, DType::f64);
  EXPECT_TRUE(bit_equal(adapter.forward(x, zero), ops::add(zero, adapter.conv().forward(x))));
  EXPECT_THROW(adapter.forward(x, Tensor::zeros({1, 5, 2, 4}, DType::f64)), ShapeError);
}

TEST(ResidualAdapter, GradientsReachBothBranches) {
  ParamInit init(2, DType::f64);
  ResidualAdapter adapter(init, 3, 4);
  auto fn = [&adapter](const std::vector<Tensor>& in) { return adapter.forward(in[0], in[1]); };
  std::vector<Tensor> inputs{random_tensor({1, 3, 4, 4}, 4, DType::f64), random_tensor({1, 4, 4, 4}, 5, DType::f64)};
  for (auto& p : adapter.parameters()) inputs.push_back(p);
  auto res = testing::gradcheck(fn, inputs, 6);
  EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
}

TEST(UBlock, BuildIsDeterministicPerSeed) {
  ParamInit a(42, DType::f64), b(42, DType::f64);
  auto x = random_tensor({1, 3, 8, 8}, 7, DType::f64);
  auto ya = build_ublock(tiny_spec(BlockKind::SS2D_B), a)->forward(x);
  auto yb = build_ublock(tiny_spec(BlockKind::SS2D_B), b)->forward(x);
  EXPECT_TRUE(bit_equal(ya, yb));
}

}  // namespace
}  // namespace nnuzoo
