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

#include "nnuzoo/kernels/attention.hpp"

#include <cmath>

#include "nnuzoo/kernels/linear.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::kernels {

namespace {

void check_heads(std::int64_t C, int heads) {
  if (heads < 1 || C % heads != 0)
    throw ShapeError("attention: channels " + std::to_string(C) + " not divisible by heads " + std::to_string(heads));
}

// B×L×C → B×h×L×d
Tensor split_heads(const Tensor& t, int heads) {
  const auto B = t.dim(0), L = t.dim(1), C = t.dim(2);
  return ops::permute(ops::reshape(t, {B, L, heads, C / heads}), {0, 2, 1, 3});
}

struct Qkv {
  Tensor q, k, v;
};

Qkv project(const Tensor& x, const AttentionWeights& w, int heads) {
  if (x.rank() != 3) throw ShapeError("attention: expects B×L×C, got " + shape_str(x.shape()));
  check_heads(x.dim(2), heads);
  return {split_heads(linear(x, w.q_w, w.q_b), heads), split_heads(linear(x, w.k_w, w.k_b), heads),
          split_heads(linear(x, w.v_w, w.v_b), heads)};
}

Tensor probs_from(const Qkv& p, const Tensor& logit_bias) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.q.dim(3)));
  Tensor logits = ops::matmul(ops::mul_scalar(p.q, scale), ops::permute(p.k, {0, 1, 3, 2}));
  if (logit_bias.defined()) logits = ops::add(logits, logit_bias);
  return ops::softmax(logits, -1);
}

}  // namespace

Tensor attention_probs(const Tensor& x, const AttentionWeights& w, int heads, const Tensor& logit_bias) {
  return probs_from(project(x, w, heads), logit_bias);
}

Tensor mhsa_values(const Tensor& x, const AttentionWeights& w, int heads, const Tensor& logit_bias) {
  const Qkv p = project(x, w, heads);
  Tensor o = ops::matmul(probs_from(p, logit_bias), p.v);  // B×h×L×d
  return ops::reshape(ops::permute(o, {0, 2, 1, 3}), x.shape());
}

Tensor mhsa(const Tensor& x, const AttentionWeights& w, int heads, const Tensor& logit_bias) {
  return linear(mhsa_values(x, w, heads, logit_bias), w.out_w, w.out_b);
}

std::int64_t relative_bias_rows(int window) { return static_cast<std::int64_t>(2 * window - 1) * (2 * window - 1); }

Tensor roll2d(const Tensor& x, std::int64_t dy, std::int64_t dx) {
  auto roll = [](const Tensor& t, int axis, std::int64_t k) {
    const auto n = t.dim(axis);
    k = ((k % n) + n) % n;
    if (k == 0) return t;
    return ops::concat({ops::slice(t, axis, n - k, n), ops::slice(t, axis, 0, n - k)}, axis);
  };
  return roll(roll(x, 1, dy), 2, dx);
}

namespace {

// Index of each (query, key) pair of a w×w window into the bias table.
std::vector<std::int64_t> relative_index(int w) {
  const std::int64_t n = static_cast<std::int64_t>(w) * w;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n * n));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      const auto dy = i / w - j / w + (w - 1);
      const auto dx = i % w - j % w + (w - 1);
      idx[i * n + j] = dy * (2 * w - 1) + dx;
    }
  return idx;
}

// nW×L×L additive mask (0 or large negative) for a shifted partition.
Tensor shift_mask(std::int64_t Hp, std::int64_t Wp, int w, int s, DType dtype) {
  std::vector<int> region(static_cast<std::size_t>(Hp * Wp));
  auto band = [w, s](std::int64_t i, std::int64_t n) { return i < n - w ? 0 : (i < n - s ? 1 : 2); };
  for (std::int64_t y = 0; y < Hp; ++y)
    for (std::int64_t x = 0; x < Wp; ++x) region[y * Wp + x] = band(y, Hp) * 3 + band(x, Wp);
  const std::int64_t nH = Hp / w, nW = Wp / w, L = static_cast<std::int64_t>(w) * w;
  std::vector<double> m(static_cast<std::size_t>(nH * nW * L * L), 0.0);
  for (std::int64_t wy = 0; wy < nH; ++wy)
    for (std::int64_t wx = 0; wx < nW; ++wx) {
      const std::int64_t win = wy * nW + wx;
      for (std::int64_t i = 0; i < L; ++i)
        for (std::int64_t j = 0; j < L; ++j) {
          const auto ri = region[(wy * w + i / w) * Wp + wx * w + i % w];
          const auto rj = region[(wy * w + j / w) * Wp + wx * w + j % w];
          if (ri != rj) m[(win * L + i) * L + j] = -1e9;
        }
    }
  return Tensor::from_vector({nH * nW, L, L}, m, dtype);
}

}  // namespace

Tensor window_attention(const Tensor& x, const AttentionWeights& wts, int window, int shift, int heads,
                        const Tensor& bias_table) {
  if (x.rank() != 4) throw ShapeError("window_attention: expects B×H×W×C, got " + shape_str(x.shape()));
  if (window < 1) throw ValueError("window_attention: window must be >= 1");
  if (shift < 0 || shift >= window) throw ValueError("window_attention: shift must lie in [0, window)");
  const auto B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  check_heads(C, heads);
  const int w = window;
  const auto Hp = (H + w - 1) / w * w, Wp = (W + w - 1) / w * w;
  Tensor t = (Hp != H || Wp != W) ? ops::pad(x, {{0, 0}, {0, Hp - H}, {0, Wp - W}, {0, 0}}) : x;
  if (shift > 0) t = roll2d(t, -shift, -shift);

  const auto nH = Hp / w, nW = Wp / w, L = static_cast<std::int64_t>(w) * w;
  // B×nH×w×nW×w×C → (B·nH·nW)×L×C
  Tensor win = ops::reshape(t, {B, nH, w, nW, w, C});
  win = ops::reshape(ops::permute(win, {0, 1, 3, 2, 4, 5}), {B * nH * nW, L, C});

  Tensor bias;
  if (bias_table.defined()) {
    if (bias_table.shape() != Shape{relative_bias_rows(w), heads})
      throw ShapeError("window_attention: bias table must be " + shape_str({relative_bias_rows(w), heads}) +
                       ", got " + shape_str(bias_table.shape()));
    bias = ops::index_select(bias_table, 0, relative_index(w));  // L²×h
    bias = ops::permute(ops::reshape(bias, {L, L, heads}), {2, 0, 1});
  }
  if (shift > 0) {
    Tensor mask = ops::reshape(shift_mask(Hp, Wp, w, shift, x.dtype()), {1, nH * nW, 1, L, L});
    Tensor full = bias.defined() ? ops::add(mask, ops::reshape(bias, {1, 1, heads, L, L})) : mask;
    // Tile over the batch so the mask lines up with the (B·nW) window axis.
    Tensor zero = Tensor::zeros({B, nH * nW, 1, 1, 1}, x.dtype());
    bias = ops::reshape(ops::add(full, zero), {B * nH * nW, full.dim(2), L, L});
  }

  Tensor out = mhsa(win, wts, heads, bias);  // (B·nW)×L×C
  out = ops::reshape(out, {B, nH, nW, w, w, C});
  out = ops::reshape(ops::permute(out, {0, 1, 3, 2, 4, 5}), {B, Hp, Wp, C});
  if (shift > 0) out = roll2d(out, shift, shift);
  if (Hp != H || Wp != W) out = ops::slice(ops::slice(out, 1, 0, H), 2, 0, W);
  return out;
}

}  // namespace nnuzoo::kernels
