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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::kernels {

/// Order in which a 2D grid is read out as a 1D sequence.
enum class Traversal : std::uint8_t { row_forward, row_backward, col_forward, col_backward };

inline constexpr std::array<Traversal, 4> kAllTraversals{Traversal::row_forward, Traversal::row_backward,
                                                         Traversal::col_forward, Traversal::col_backward};

std::string traversal_name(Traversal t);

/// perm[s] = flat row-major grid index read at sequence position s.
std::vector<std::int64_t> traversal_permutation(Traversal t, std::int64_t H, std::int64_t W);
std::vector<std::int64_t> inverse_permutation(const std::vector<std::int64_t>& perm);

/// B×C×H×W → B×(H·W)×C in traversal order.
Tensor to_sequence(const Tensor& x, Traversal t);
/// Inverse of to_sequence: B×(H·W)×C → B×C×H×W.
Tensor from_sequence(const Tensor& seq, Traversal t, std::int64_t H, std::int64_t W);

}  // namespace nnuzoo::kernels
