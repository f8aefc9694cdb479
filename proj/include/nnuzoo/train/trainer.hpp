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
#include <string>
#include <vector>

#include "nnuzoo/data/dataset.hpp"
#include "nnuzoo/models/model.hpp"
#include "nnuzoo/train/loss.hpp"

namespace nnuzoo::train {

struct OptimizerConfig {
  enum class Kind { adam, sgd };
  Kind kind = Kind::adam;
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;  // adam
  double momentum = 0.99;                         // sgd
  bool nesterov = true;                           // sgd
  double weight_decay = 0.0;

  static OptimizerConfig adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999);
  static OptimizerConfig sgd(double lr = 0.01, double momentum = 0.99, bool nesterov = true);
  void validate() const;
};

std::string optimizer_name(OptimizerConfig::Kind kind);
OptimizerConfig::Kind optimizer_from_name(const std::string& name);

/// Per-parameter first-order optimizer.
class Optimizer {
 public:
  Optimizer(std::vector<Tensor> params, OptimizerConfig cfg);

  /// Applies one update from the accumulated grad() of every parameter at
  /// learning rate `lr`; parameters without a gradient are skipped.
  void step(double lr);
  void zero_grad();
  std::int64_t steps() const { return t_; }

 private:
  std::vector<Tensor> params_;
  OptimizerConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t t_ = 0;
};

/// base·(1 − t/T)^exponent, clamped at 0 for t ≥ T.
double poly_lr(double base, std::int64_t t, std::int64_t total, double exponent = 0.9);

struct TrainConfig {
  std::int64_t epochs = 20;
  std::int64_t batch_size = 8;
  OptimizerConfig optimizer;
  double poly_exponent = 0.9;
  LossWeights loss;
  std::uint64_t seed = 0;
  bool augment = true;
  data::AugmentOptions augment_options;
  /// Writes history.csv, best.ckpt and last.ckpt here when non-empty.
  std::string out_dir;
  /// Also writes epoch_<n>.ckpt every this many epochs (0 disables).
  std::int64_t checkpoint_every = 0;

  void validate() const;
};

struct EpochRecord {
  std::int64_t epoch = 0;  // 1-based
  double lr = 0;           // rate used for the first step of the epoch
  double train_loss = 0;
  double val_loss = 0;
  double val_dice = 0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::int64_t best_epoch = 0;
  double best_val_dice = -1;
  std::int64_t steps = 0;
};

struct EvalResult {
  double loss = 0;
  double mean_dice = 0;
  std::vector<double> case_dice;  // dataset order
  std::vector<std::string> case_ids;
};

/// Loss and hard-argmax mean foreground dice, no tape recorded.
EvalResult evaluate(Model& model, const data::Dataset& ds, std::int64_t batch_size, const LossWeights& w = {});

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains in place. Batch order and augmentation draws depend only on
/// cfg.seed. The best-val-dice weights are kept in best.ckpt when out_dir is
/// set. Throws NonFiniteError naming the step when the loss is not finite.
TrainResult train_loop(Model& model, const data::Dataset& train_set, const data::Dataset& val_set,
                       const TrainConfig& cfg, const EpochCallback& on_epoch = {});

void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history);
std::vector<EpochRecord> read_history_csv(const std::string& path);

}  // namespace nnuzoo::train
