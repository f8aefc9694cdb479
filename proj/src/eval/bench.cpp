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

#include "nnuzoo/eval/bench.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <random>

#include "nnuzoo/tensor/parallel.hpp"
#include "nnuzoo/tensor/tape.hpp"
#include "nnuzoo/train/loss.hpp"

namespace nnuzoo::eval {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TimingStats summarize_times(std::vector<double> samples_ms) {
  if (samples_ms.empty()) throw ValueError("summarize_times: no samples");
  TimingStats s;
  s.samples_ms = samples_ms;
  std::sort(samples_ms.begin(), samples_ms.end());
  s.median_ms = quantile(samples_ms, 0.5);
  s.q1_ms = quantile(samples_ms, 0.25);
  s.q3_ms = quantile(samples_ms, 0.75);
  return s;
}

TimingRecord benchmark_model(const ModelConfig& cfg, const BenchOptions& opt) {
  if (opt.reps < 3) throw ValueError("benchmark_model: reps must be >= 3, got " + std::to_string(opt.reps));
  if (opt.warmup < 0) throw ValueError("benchmark_model: warmup must be >= 0");
  auto model = build_model(cfg);
  for (auto& p : model->parameters()) p.set_requires_grad(true);

  TimingRecord r;
  r.arch = cfg.arch;
  r.preset = cfg.preset;
  r.params = model->count_params();
  r.batch = opt.batch > 0 ? opt.batch : cfg.batch_size;
  r.height = cfg.height;
  r.width = cfg.width;
  r.width_mult = cfg.width_mult;
  r.reps = opt.reps;
  r.warmup = opt.warmup;
  r.threads = num_threads();
  r.dtype = "f32";

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  std::vector<double> img(static_cast<std::size_t>(r.batch * cfg.in_channels * r.height * r.width));
  for (auto& v : img) v = normal(rng);
  const Tensor x = Tensor::from_vector({r.batch, cfg.in_channels, r.height, r.width}, img);
  std::vector<std::uint16_t> labels(static_cast<std::size_t>(r.batch * r.height * r.width));
  for (auto& l : labels) l = static_cast<std::uint16_t>(rng() % static_cast<std::uint64_t>(cfg.num_classes));

  std::vector<double> fwd, step;
  for (int i = 0; i < opt.warmup + opt.reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    {
      Tape::Pause pause;
      model->forward(x);
    }
    const double f = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    {
      Tape tape;
      Tensor loss;
      {
        Tape::Scope scope(tape);
        loss = train::segmentation_loss(model->forward(x), labels);
      }
      tape.backward(loss);
    }
    const double s = elapsed_ms(t0);
    for (auto& p : model->parameters()) p.zero_grad();
    if (i >= opt.warmup) {
      fwd.push_back(f);
      step.push_back(s);
    }
  }
  r.forward = summarize_times(fwd);
  r.step = summarize_times(step);
  return r;
}

double CaseDice::mean() const {
  if (dice.empty()) return 0.0;
  double s = 0;
  for (double d : dice) s += d;
  return s / static_cast<double>(dice.size());
}

PairwiseTest pairwise_wilcoxon(const std::vector<CaseDice>& runs, const WilcoxonOptions& opt) {
  PairwiseTest t;
  const auto n = runs.size();
  t.p.assign(n, std::vector<std::optional<double>>(n));
  std::vector<std::map<std::string, double>> by_id(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.labels.push_back(runs[i].label);
    if (runs[i].case_ids.size() != runs[i].dice.size())
      throw DataError("run '" + runs[i].label + "': case ids and dice values differ in length");
    for (std::size_t c = 0; c < runs[i].dice.size(); ++c)
      if (!by_id[i].emplace(runs[i].case_ids[c], runs[i].dice[c]).second)
        throw DataError("run '" + runs[i].label + "': duplicate case '" + runs[i].case_ids[c] + "'");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> a, b;
      for (const auto& [id, v] : by_id[i]) {
        const auto it = by_id[j].find(id);
        if (it == by_id[j].end())
          throw DataError("case '" + id + "' of run '" + runs[i].label + "' is missing from run '" + runs[j].label + "'");
        a.push_back(v);
        b.push_back(it->second);
      }
      if (by_id[j].size() != by_id[i].size())
        throw DataError("runs '" + runs[i].label + "' and '" + runs[j].label + "' cover different cases");
      try {
        const double p = wilcoxon_signed_rank(a, b, opt).p_value;
        t.p[i][j] = t.p[j][i] = p;
      } catch (const UndefinedTestError&) {
        t.undefined.emplace_back(runs[i].label, runs[j].label);
      }
    }
  return t;
}

}  // namespace nnuzoo::eval
