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

#include "nnuzoo/eval/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nnuzoo::eval {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  throw ValueError("unknown report format '" + name + "' (expected csv or markdown)");
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream o(path);
  if (!o) throw DataError("cannot write '" + path + "'");
  auto row = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
    o << '\n';
  };
  row(t.header);
  for (const auto& r : t.rows) row(r);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto r = split(line);
    if (r.size() != t.header.size())
      throw DataError("'" + path + "': row has " + std::to_string(r.size()) + " fields, header has " +
                      std::to_string(t.header.size()));
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_case_dice_csv(const std::string& path, const CaseDice& d) {
  CsvTable t{{"case_id", "dice"}, {}};
  for (std::size_t i = 0; i < d.dice.size(); ++i) t.rows.push_back({d.case_ids[i], format_double(d.dice[i])});
  write_csv(path, t);
}

CaseDice read_case_dice_csv(const std::string& path) {
  const auto t = read_csv(path);
  if (t.header != std::vector<std::string>{"case_id", "dice"})
    throw DataError("'" + path + "' is not a per-case dice file (expected header case_id,dice)");
  CaseDice d;
  d.label = fs::path(path).stem().string();
  for (const auto& r : t.rows) {
    double v;
    const auto res = std::from_chars(r[1].data(), r[1].data() + r[1].size(), v);
    if (res.ec != std::errc() || res.ptr != r[1].data() + r[1].size() || !(v >= 0 && v <= 1))
      throw DataError("'" + path + "': bad dice value '" + r[1] + "' for case '" + r[0] + "'");
    d.case_ids.push_back(r[0]);
    d.dice.push_back(v);
  }
  return d;
}

namespace {

/// Known presets in canonical order, then any others sorted.
std::vector<std::string> preset_columns(const std::vector<std::string>& used) {
  std::vector<std::string> out;
  const std::set<std::string> u(used.begin(), used.end());
  for (const auto& p : preset_names())
    if (u.count(p)) out.push_back(p);
  for (const auto& p : u)
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  return out;
}

/// Architecture names in zoo order, then other labels in first-seen order.
std::vector<std::string> row_labels(const std::vector<std::string>& used) {
  std::vector<std::string> out;
  for (auto a : all_architectures())
    if (std::find(used.begin(), used.end(), arch_name(a)) != used.end()) out.push_back(arch_name(a));
  for (const auto& l : used)
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

struct Grid {
  std::vector<std::string> rows, cols;
  std::map<std::pair<std::string, std::string>, double> cells;
};

template <class R, class Label, class Value>
Grid grid_of(const std::vector<R>& records, Label label, Value value) {
  Grid g;
  std::vector<std::string> labels, presets;
  for (const auto& r : records) {
    labels.push_back(label(r));
    presets.push_back(r.preset);
    g.cells[{label(r), r.preset}] = value(r);
  }
  g.rows = row_labels(labels);
  g.cols = preset_columns(presets);
  return g;
}

CsvTable grid_csv(const Grid& g, const std::string& corner) {
  CsvTable t;
  t.header.push_back(corner);
  t.header.insert(t.header.end(), g.cols.begin(), g.cols.end());
  for (const auto& r : g.rows) {
    std::vector<std::string> row{r};
    for (const auto& c : g.cols) {
      const auto it = g.cells.find({r, c});
      row.push_back(it == g.cells.end() ? "" : format_double(it->second));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void markdown_table(std::ostream& o, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& r) {
    o << '|';
    for (const auto& f : r) o << ' ' << f << " |";
    o << '\n';
  };
  line(header);
  o << '|';
  for (std::size_t i = 0; i < header.size(); ++i) o << "---|";
  o << '\n';
  for (const auto& r : rows) line(r);
  o << '\n';
}

CsvTable timing_csv(const std::vector<TimingRecord>& ts) {
  CsvTable t{{"architecture", "preset", "params", "batch", "height", "width", "width_mult", "threads", "dtype", "reps",
              "warmup", "forward_median_ms", "forward_q1_ms", "forward_q3_ms", "step_median_ms", "step_q1_ms",
              "step_q3_ms"},
             {}};
  for (const auto& r : ts)
    t.rows.push_back({arch_name(r.arch), r.preset, std::to_string(r.params), std::to_string(r.batch),
                      std::to_string(r.height), std::to_string(r.width), format_double(r.width_mult),
                      std::to_string(r.threads), r.dtype, std::to_string(r.reps), std::to_string(r.warmup),
                      format_double(r.forward.median_ms), format_double(r.forward.q1_ms),
                      format_double(r.forward.q3_ms), format_double(r.step.median_ms), format_double(r.step.q1_ms),
                      format_double(r.step.q3_ms)});
  return t;
}

CsvTable pvalue_csv(const PairwiseTest& p) {
  CsvTable t;
  t.header.push_back("run");
  t.header.insert(t.header.end(), p.labels.begin(), p.labels.end());
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    std::vector<std::string> row{p.labels[i]};
    for (std::size_t j = 0; j < p.labels.size(); ++j)
      row.push_back(i == j ? "" : p.p[i][j] ? format_double(*p.p[i][j]) : "undefined");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

std::vector<std::string> emit_report(const BenchReport& report, const std::string& dir, ReportFormat format) {
  if (report.empty()) throw ValueError("emit_report: nothing to report");
  fs::create_directories(dir);
  const auto path = [&](const std::string& f) { return (fs::path(dir) / f).string(); };
  const auto params = grid_of(
      report.params, [](const ParamRecord& r) { return arch_name(r.arch); },
      [](const ParamRecord& r) { return static_cast<double>(r.params); });
  const auto dice = grid_of(
      report.dice, [](const CaseDice& d) { return d.label; }, [](const CaseDice& d) { return d.mean(); });

  std::vector<std::string> written;
  if (format == ReportFormat::csv) {
    if (!report.params.empty()) {
      write_csv(path("params.csv"), grid_csv(params, "architecture"));
      written.push_back(path("params.csv"));
    }
    if (!report.dice.empty()) {
      write_csv(path("dice.csv"), grid_csv(dice, "architecture"));
      written.push_back(path("dice.csv"));
    }
    if (!report.timings.empty()) {
      write_csv(path("timing.csv"), timing_csv(report.timings));
      written.push_back(path("timing.csv"));
    }
    if (report.pvalues) {
      write_csv(path("pvalues.csv"), pvalue_csv(*report.pvalues));
      written.push_back(path("pvalues.csv"));
    }
    return written;
  }

  std::ofstream o(path("report.md"));
  if (!o) throw DataError("cannot write '" + path("report.md") + "'");
  if (!report.params.empty()) {
    o << "## Parameters (millions)\n\n";
    std::map<std::pair<std::string, std::string>, std::optional<double>> targets;
    for (const auto& r : report.params) targets[{arch_name(r.arch), r.preset}] = r.target_millions;
    std::vector<std::string> header{"Architecture"};
    header.insert(header.end(), params.cols.begin(), params.cols.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : params.rows) {
      std::vector<std::string> row{r};
      for (const auto& c : params.cols) {
        const auto it = params.cells.find({r, c});
        if (it == params.cells.end()) {
          row.emplace_back("");
          continue;
        }
        const double m = it->second / 1e6;
        std::string cell = fixed(m, 2);
        if (const auto& t = targets[{r, c}]; t) cell += " (" + std::string(m >= *t ? "+" : "") + fixed(100 * (m / *t - 1), 1) + "%)";
        row.push_back(cell);
      }
      rows.push_back(std::move(row));
    }
    markdown_table(o, header, rows);
  }
  if (!report.dice.empty()) {
    o << "## Mean foreground dice\n\nA class absent from both prediction and ground truth scores 1.\n\n";
    std::vector<std::string> header{"Model"};
    header.insert(header.end(), dice.cols.begin(), dice.cols.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : dice.rows) {
      std::vector<std::string> row{r};
      for (const auto& c : dice.cols) {
        const auto it = dice.cells.find({r, c});
        row.push_back(it == dice.cells.end() ? "" : fixed(it->second, 4));
      }
      rows.push_back(std::move(row));
    }
    markdown_table(o, header, rows);
  }
  if (!report.timings.empty()) {
    o << "## Step time (ms, median [q1, q3])\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report.timings)
      rows.push_back({arch_name(r.arch), r.preset,
                      std::to_string(r.batch) + "×" + std::to_string(r.height) + "×" + std::to_string(r.width),
                      fixed(r.forward.median_ms, 1) + " [" + fixed(r.forward.q1_ms, 1) + ", " + fixed(r.forward.q3_ms, 1) + "]",
                      fixed(r.step.median_ms, 1) + " [" + fixed(r.step.q1_ms, 1) + ", " + fixed(r.step.q3_ms, 1) + "]",
                      std::to_string(r.threads)});
    markdown_table(o, {"Architecture", "Preset", "Batch", "Forward", "Forward+backward", "Threads"}, rows);
  }
  if (report.pvalues) {
    o << "## Wilcoxon signed-rank p-values (two-sided)\n\n";
    const auto t = pvalue_csv(*report.pvalues);
    auto header = t.header;
    header[0] = "";
    markdown_table(o, header, t.rows);
  }
  written.push_back(path("report.md"));
  return written;
}

}  // namespace nnuzoo::eval
