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
#include <span>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo::eval {

inline constexpr std::uint16_t kIgnore = 65535;

/// 2|P∩G| / (|P|+|G|) for class k over pixels whose gt is not ignored.
/// Both sets empty gives 1.0. Throws ShapeError on a size mismatch.
double dice_score(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt, std::uint16_t k);

struct DiceOptions {
  bool foreground_only = true;  // skip class 0
};

/// Mean dice over the classes present in gt. When gt holds none of the
/// evaluated classes, the mean runs over all of them instead (so a clean
/// prediction scores 1 and any false positive pulls it down).
double mean_dice(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt, std::int64_t num_classes,
                 const DiceOptions& opt = {});

/// Per-pixel argmax over axis 1 of B×K×H×W logits, B·H·W labels row-major.
/// Ties go to the lowest class.
std::vector<std::uint16_t> argmax_labels(const Tensor& logits);

enum class ZeroMethod {
  wilcox,  // drop zero differences
  pratt,   // rank zeros, then drop them
};

struct WilcoxonResult {
  double w_plus = 0, w_minus = 0;
  double statistic = 0;  // min(W+, W-)
  double p_value = 1;    // two-sided
  std::int64_t n_effective = 0;
  bool exact = false;
  bool ties = false;
};

struct WilcoxonOptions {
  ZeroMethod zero_method = ZeroMethod::wilcox;
  std::int64_t exact_max_n = 12;
};

/// Paired two-sided signed-rank test on a - b. Ties get average ranks. Exact
/// null distribution up to `exact_max_n` effective pairs, otherwise a normal
/// approximation with tie-corrected variance and continuity correction.
/// Throws UndefinedTestError when every difference is zero and ValueError on
/// mismatched or empty inputs.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    const WilcoxonOptions& opt = {});

/// Exact two-sided p for observed W+ given the signed-rank magnitudes.
double wilcoxon_exact_p(std::span<const double> ranks, double w_plus);
/// Normal approximation for the same quantity.
double wilcoxon_normal_p(std::span<const double> ranks, double w_plus);

/// Average ranks (1-based) of |d| among the given values.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace nnuzoo::eval
