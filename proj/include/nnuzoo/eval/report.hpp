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

#include <optional>
#include <string>
#include <vector>

#include "nnuzoo/eval/bench.hpp"

namespace nnuzoo::eval {

struct ParamRecord {
  ArchitectureId arch = ArchitectureId::U2NetS;
  std::string preset;
  std::int64_t params = 0;
  std::optional<double> target_millions;
};

struct BenchReport {
  std::vector<ParamRecord> params;
  std::vector<TimingRecord> timings;
  std::vector<CaseDice> dice;
  std::optional<PairwiseTest> pvalues;

  bool empty() const { return params.empty() && timings.empty() && dice.empty() && !pvalues; }
};

enum class ReportFormat { csv, markdown };
ReportFormat report_format_from_name(const std::string& name);

/// Writes the non-empty tables of `report` into `dir` and returns the paths.
/// csv: params.csv, dice.csv (architecture rows × preset columns),
/// timing.csv, pvalues.csv (square). markdown: report.md with the same
/// tables. Throws ValueError for an empty report.
std::vector<std::string> emit_report(const BenchReport& report, const std::string& dir, ReportFormat format);

/// Plain comma-separated table, no quoting (fields never contain commas).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

/// "case_id,dice" rows, as written by the eval command.
void write_case_dice_csv(const std::string& path, const CaseDice& d);
CaseDice read_case_dice_csv(const std::string& path);

/// Shortest round-tripping decimal form.
std::string format_double(double v);

}  // namespace nnuzoo::eval
