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

#include "stats_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace nnuzoo::testing {

double wilcoxon_enumeration_p(std::span<const double> ranks, double w_plus) {
  const auto n = ranks.size();
  const std::uint64_t total = std::uint64_t{1} << n;
  double le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += ranks[i];
    if (w <= w_plus) le += 1;
    if (w >= w_plus) ge += 1;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / std::ldexp(1.0, static_cast<int>(n)));
}

}  // namespace nnuzoo::testing
