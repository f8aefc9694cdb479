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

#include "nnuzoo/kernels/traversal.hpp"

#include <algorithm>
#include <numeric>

#include "nnuzoo/error.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo::kernels {

std::string traversal_name(Traversal t) {
  switch (t) {
    case Traversal::row_forward: return "row_forward";
    case Traversal::row_backward: return "row_backward";
    case Traversal::col_forward: return "col_forward";
    case Traversal::col_backward: return "col_backward";
  }
  return "?";
}

std::vector<std::int64_t> traversal_permutation(Traversal t, std::int64_t H, std::int64_t W) {
  const std::int64_t L = H * W;
  std::vector<std::int64_t> perm(static_cast<std::size_t>(L));
  const bool cols = t == Traversal::col_forward || t == Traversal::col_backward;
  for (std::int64_t s = 0; s < L; ++s) perm[s] = cols ? (s % H) * W + s / H : s;
  if (t == Traversal::row_backward || t == Traversal::col_backward) std::reverse(perm.begin(), perm.end());
  return perm;
}

std::vector<std::int64_t> inverse_permutation(const std::vector<std::int64_t>& perm) {
  std::vector<std::int64_t> inv(perm.size(), -1);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    const auto p = perm[s];
    if (p < 0 || p >= static_cast<std::int64_t>(perm.size()) || inv[p] != -1)
      throw ValueError("inverse_permutation: input is not a permutation");
    inv[p] = static_cast<std::int64_t>(s);
  }
  return inv;
}

namespace {

bool is_backward(Traversal t) { return t == Traversal::row_backward || t == Traversal::col_backward; }
bool is_cols(Traversal t) { return t == Traversal::col_forward || t == Traversal::col_backward; }

Tensor reverse_seq(const Tensor& s) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(s.dim(1)));
  std::iota(idx.rbegin(), idx.rend(), 0);
  return ops::index_select(s, 1, idx);
}

}  // namespace

Tensor to_sequence(const Tensor& x, Traversal t) {
  if (x.rank() != 4) throw ShapeError("to_sequence: expects B×C×H×W, got " + shape_str(x.shape()));
  const auto B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  Tensor s = is_cols(t) ? ops::permute(x, {0, 3, 2, 1}) : ops::permute(x, {0, 2, 3, 1});
  s = ops::reshape(s, {B, H * W, C});
  return is_backward(t) ? reverse_seq(s) : s;
}

Tensor from_sequence(const Tensor& seq, Traversal t, std::int64_t H, std::int64_t W) {
  if (seq.rank() != 3 || seq.dim(1) != H * W)
    throw ShapeError("from_sequence: expects B×" + std::to_string(H * W) + "×C, got " + shape_str(seq.shape()));
  const auto B = seq.dim(0), C = seq.dim(2);
  Tensor s = is_backward(t) ? reverse_seq(seq) : seq;
  if (is_cols(t)) return ops::permute(ops::reshape(s, {B, W, H, C}), {0, 3, 2, 1});
  return ops::permute(ops::reshape(s, {B, H, W, C}), {0, 3, 1, 2});
}

}  // namespace nnuzoo::kernels
