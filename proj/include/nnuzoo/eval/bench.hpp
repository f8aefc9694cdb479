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
#include <optional>
#include <string>
#include <vector>

#include "nnuzoo/eval/metrics.hpp"
#include "nnuzoo/models/model.hpp"

namespace nnuzoo::eval {

struct TimingStats {
  double median_ms = 0, q1_ms = 0, q3_ms = 0;
  std::vector<double> samples_ms;

  double iqr_ms() const { return q3_ms - q1_ms; }
};

/// Median and quartiles (linear interpolation between order statistics).
TimingStats summarize_times(std::vector<double> samples_ms);

struct TimingRecord {
  ArchitectureId arch = ArchitectureId::U2NetS;
  std::string preset;
  std::int64_t params = 0;
  std::int64_t batch = 0, height = 0, width = 0;
  double width_mult = 1.0;
  int reps = 0, warmup = 0;
  int threads = 1;
  std::string dtype = "f32";
  TimingStats forward;  // forward only
  TimingStats step;     // forward + loss + backward
};

struct BenchOptions {
  int reps = 5;
  int warmup = 1;
  std::int64_t batch = 0;  // 0: the config's batch size
  std::uint64_t seed = 0;  // input draw
};

/// Builds `cfg` and times forward and forward+backward passes on random
/// inputs and labels at the config geometry. Throws ValueError for reps < 3.
TimingRecord benchmark_model(const ModelConfig& cfg, const BenchOptions& opt = {});

/// Per-case dice of one model on one dataset.
struct CaseDice {
  std::string label;  // run or architecture name
  std::string preset;
  std::vector<std::string> case_ids;
  std::vector<double> dice;

  double mean() const;
};

/// Square matrix of two-sided Wilcoxon p-values over paired cases (matched
/// by case id). Diagonal entries and undefined tests are empty.
struct PairwiseTest {
  std::vector<std::string> labels;
  std::vector<std::vector<std::optional<double>>> p;
  std::vector<std::pair<std::string, std::string>> undefined;
};

/// Throws DataError when two runs do not cover the same case ids.
PairwiseTest pairwise_wilcoxon(const std::vector<CaseDice>& runs, const WilcoxonOptions& opt = {});

}  // namespace nnuzoo::eval
