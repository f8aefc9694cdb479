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
#include <functional>

namespace nnuzoo {

/// Worker count for batch-parallel kernels. Defaults to NNUZOO_THREADS or 1.
int num_threads();
void set_num_threads(int n);

/// Runs fn(i) for i in [0, n). Iterations must write disjoint outputs; any
/// cross-iteration reduction is left to the caller so results do not depend
/// on the thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace nnuzoo
