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

#include "nnuzoo/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nnuzoo/error.hpp"

namespace nnuzoo::eval {

double dice_score(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt, std::uint16_t k) {
  if (pred.size() != gt.size())
    throw ShapeError("dice_score: " + std::to_string(pred.size()) + " predictions vs " + std::to_string(gt.size()) +
                     " labels");
  std::int64_t inter = 0, np = 0, ng = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kIgnore) continue;
    const bool p = pred[i] == k, g = gt[i] == k;
    inter += p && g;
    np += p;
    ng += g;
  }
  if (np + ng == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(np + ng);
}

double mean_dice(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt, std::int64_t num_classes,
                 const DiceOptions& opt) {
  if (num_classes < 2) throw ValueError("mean_dice: num_classes must be >= 2");
  if (pred.size() != gt.size()) throw ShapeError("mean_dice: size mismatch");
  std::vector<char> present(static_cast<std::size_t>(num_classes), 0);
  for (auto g : gt)
    if (g != kIgnore && g < num_classes) present[g] = 1;
  const std::uint16_t first = opt.foreground_only ? 1 : 0;
  bool any = false;
  for (auto k = first; k < num_classes; ++k) any |= present[k] != 0;
  double total = 0;
  int n = 0;
  for (auto k = first; k < num_classes; ++k) {
    if (any && !present[k]) continue;
    total += dice_score(pred, gt, k);
    ++n;
  }
  return total / n;
}

std::vector<std::uint16_t> argmax_labels(const Tensor& logits) {
  if (logits.rank() != 4) throw ShapeError("argmax_labels: expected B×K×H×W, got " + shape_str(logits.shape()));
  const auto B = logits.dim(0), K = logits.dim(1), HW = logits.dim(2) * logits.dim(3);
  const auto v = logits.to_vector();
  std::vector<std::uint16_t> out(static_cast<std::size_t>(B * HW));
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t i = 0; i < HW; ++i) {
      std::int64_t best = 0;
      double bv = v[static_cast<std::size_t>(b * K * HW + i)];
      for (std::int64_t k = 1; k < K; ++k) {
        const double x = v[static_cast<std::size_t>((b * K + k) * HW + i)];
        if (x > bv) bv = x, best = k;
      }
      out[static_cast<std::size_t>(b * HW + i)] = static_cast<std::uint16_t>(best);
    }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const auto n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (auto t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double wilcoxon_exact_p(std::span<const double> ranks, double w_plus) {
  // Doubled ranks are integers (average ranks are multiples of 0.5).
  std::vector<std::int64_t> r2(ranks.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) total += r2[i] = std::llround(2 * ranks[i]);
  std::vector<double> count(static_cast<std::size_t>(total + 1), 0.0);
  count[0] = 1;
  std::int64_t reach = 0;
  for (auto r : r2) {
    for (auto s = reach; s >= 0; --s) count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
    reach += r;
  }
  const auto w2 = std::llround(2 * w_plus);
  double le = 0, ge = 0;
  for (std::int64_t s = 0; s <= total; ++s) {
    if (s <= w2) le += count[static_cast<std::size_t>(s)];
    if (s >= w2) ge += count[static_cast<std::size_t>(s)];
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / std::ldexp(1.0, static_cast<int>(ranks.size())));
}

double wilcoxon_normal_p(std::span<const double> ranks, double w_plus) {
  double mean = 0, var = 0;
  for (double r : ranks) {
    mean += r / 2;
    var += r * r / 4;
  }
  if (var <= 0) return 1.0;
  const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  if (z <= 0) return 1.0;
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, const WilcoxonOptions& opt) {
  if (a.size() != b.size())
    throw ValueError("wilcoxon: series lengths differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  if (a.empty()) throw ValueError("wilcoxon: need at least one pair");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0; }))
    throw UndefinedTestError("wilcoxon: every paired difference is zero; the test is undefined");

  std::vector<double> kept;
  std::vector<double> mags;
  if (opt.zero_method == ZeroMethod::wilcox) {
    for (double x : d)
      if (x != 0) kept.push_back(x);
    for (double x : kept) mags.push_back(std::abs(x));
  } else {
    kept = d;
    for (double x : d) mags.push_back(std::abs(x));
  }
  auto ranks = average_ranks(mags);
  WilcoxonResult r;
  std::vector<double> used;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] == 0) continue;
    used.push_back(ranks[i]);
    (kept[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
  }
  r.n_effective = static_cast<std::int64_t>(used.size());
  std::vector<double> sorted = used;
  std::sort(sorted.begin(), sorted.end());
  r.ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  r.statistic = std::min(r.w_plus, r.w_minus);
  r.exact = r.n_effective <= opt.exact_max_n;
  r.p_value = r.exact ? wilcoxon_exact_p(used, r.w_plus) : wilcoxon_normal_p(used, r.w_plus);
  return r;
}

}  // namespace nnuzoo::eval
