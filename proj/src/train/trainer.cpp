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

#include "nnuzoo/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nnuzoo/eval/metrics.hpp"
#include "nnuzoo/models/checkpoint.hpp"
#include "nnuzoo/tensor/tape.hpp"

namespace nnuzoo::train {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- optimizer

OptimizerConfig OptimizerConfig::adam(double lr, double beta1, double beta2) {
  OptimizerConfig c;
  c.kind = Kind::adam;
  c.lr = lr;
  c.beta1 = beta1;
  c.beta2 = beta2;
  return c;
}

OptimizerConfig OptimizerConfig::sgd(double lr, double momentum, bool nesterov) {
  OptimizerConfig c;
  c.kind = Kind::sgd;
  c.lr = lr;
  c.momentum = momentum;
  c.nesterov = nesterov;
  return c;
}

void OptimizerConfig::validate() const {
  if (!(lr > 0)) throw ValueError("optimizer: lr must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw ValueError("optimizer: betas must be in [0, 1)");
  if (!(eps > 0)) throw ValueError("optimizer: eps must be positive");
  if (!(momentum >= 0 && momentum < 1)) throw ValueError("optimizer: momentum must be in [0, 1)");
  if (!(weight_decay >= 0)) throw ValueError("optimizer: weight_decay must be >= 0");
}

std::string optimizer_name(OptimizerConfig::Kind kind) { return kind == OptimizerConfig::Kind::adam ? "adam" : "sgd"; }

OptimizerConfig::Kind optimizer_from_name(const std::string& name) {
  if (name == "adam") return OptimizerConfig::Kind::adam;
  if (name == "sgd") return OptimizerConfig::Kind::sgd;
  throw ValueError("unknown optimizer '" + name + "' (expected adam or sgd)");
}

Optimizer::Optimizer(std::vector<Tensor> params, OptimizerConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  cfg_.validate();
  for (auto& p : params_) {
    if (p.is_meta()) throw ValueError("optimizer: parameters have no storage");
    p.set_requires_grad(true);
    m_.emplace_back(static_cast<std::size_t>(p.numel()), 0.0);
    if (cfg_.kind == OptimizerConfig::Kind::adam) v_.emplace_back(static_cast<std::size_t>(p.numel()), 0.0);
  }
}

void Optimizer::step(double lr) {
  ++t_;
  const bool adam = cfg_.kind == OptimizerConfig::Kind::adam;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    const Tensor g = p.grad();
    if (!g.defined()) continue;
    const auto gv = g.to_vector();
    auto& m = m_[i];
    dispatch(p.dtype(), [&]<class T>() {
      auto w = p.template mutable_data<T>();
      for (std::size_t j = 0; j < gv.size(); ++j) {
        const double wj = static_cast<double>(w[j]);
        const double gj = gv[j] + cfg_.weight_decay * wj;
        double upd;
        if (adam) {
          auto& v = v_[i];
          m[j] = cfg_.beta1 * m[j] + (1 - cfg_.beta1) * gj;
          v[j] = cfg_.beta2 * v[j] + (1 - cfg_.beta2) * gj * gj;
          upd = (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg_.eps);
        } else {
          m[j] = cfg_.momentum * m[j] + gj;
          upd = cfg_.nesterov ? gj + cfg_.momentum * m[j] : m[j];
        }
        w[j] = static_cast<T>(wj - lr * upd);
      }
    });
  }
}

void Optimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double poly_lr(double base, std::int64_t t, std::int64_t total, double exponent) {
  if (total <= 0 || t >= total) return 0.0;
  return base * std::pow(1.0 - static_cast<double>(t) / static_cast<double>(total), exponent);
}

// ---------------------------------------------------------------- loop

void TrainConfig::validate() const {
  if (epochs < 1) throw ValueError("train: epochs must be >= 1");
  if (batch_size < 1) throw ValueError("train: batch_size must be >= 1");
  if (!(poly_exponent >= 0)) throw ValueError("train: poly exponent must be >= 0");
  if (checkpoint_every < 0) throw ValueError("train: checkpoint_every must be >= 0");
  optimizer.validate();
  loss.validate();
}

namespace {

void check_geometry(const Model& model, const data::Dataset& ds, const char* which) {
  const auto& c = model.config();
  if (ds.empty()) throw ValueError(std::string("train: ") + which + " set is empty");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto s = ds.at(i);
    if (s.channels() != c.in_channels || s.height() != c.height || s.width() != c.width)
      throw ShapeError(std::string("train: ") + which + " sample '" + s.id + "' is " + shape_str(s.image.shape()) +
                       ", model expects " + std::to_string(c.in_channels) + "×" + std::to_string(c.height) + "×" +
                       std::to_string(c.width));
  }
  if (ds.num_classes() != c.num_classes)
    throw ShapeError(std::string("train: ") + which + " set has " + std::to_string(ds.num_classes()) +
                     " classes, model predicts " + std::to_string(c.num_classes));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EvalResult evaluate(Model& model, const data::Dataset& ds, std::int64_t batch_size, const LossWeights& w) {
  if (batch_size < 1) throw ValueError("evaluate: batch_size must be >= 1");
  Tape::Pause pause;
  EvalResult r;
  const auto K = model.config().num_classes;
  double loss_sum = 0;
  for (std::size_t start = 0; start < ds.size(); start += static_cast<std::size_t>(batch_size)) {
    const auto stop = std::min(ds.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<data::SegmentationSample> samples;
    for (auto i = start; i < stop; ++i) samples.push_back(ds.at(i));
    const auto batch = data::make_batch(samples, DType::f32);
    const Tensor logits = model.forward(batch.images);
    loss_sum += segmentation_loss(logits, batch.labels, w).item() * static_cast<double>(batch.size);
    const auto pred = eval::argmax_labels(logits);
    const auto hw = static_cast<std::size_t>(batch.height * batch.width);
    for (std::size_t b = 0; b < samples.size(); ++b) {
      const std::span<const std::uint16_t> p(pred.data() + b * hw, hw), g(batch.labels.data() + b * hw, hw);
      r.case_dice.push_back(eval::mean_dice(p, g, K));
      r.case_ids.push_back(samples[b].id);
    }
  }
  r.loss = loss_sum / static_cast<double>(ds.size());
  double total = 0;
  for (double d : r.case_dice) total += d;
  r.mean_dice = total / static_cast<double>(r.case_dice.size());
  return r;
}

TrainResult train_loop(Model& model, const data::Dataset& train_set, const data::Dataset& val_set,
                       const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  check_geometry(model, train_set, "training");
  check_geometry(model, val_set, "validation");
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  const auto out = [&](const std::string& f) { return (fs::path(cfg.out_dir) / f).string(); };

  std::mt19937_64 order_rng(cfg.seed);
  std::mt19937_64 aug_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto n = train_set.size();
  const auto B = static_cast<std::size_t>(cfg.batch_size);
  const auto steps_per_epoch = static_cast<std::int64_t>((n + B - 1) / B);
  const auto total_steps = steps_per_epoch * cfg.epochs;

  Optimizer opt(model.parameters(), cfg.optimizer);
  TrainResult result;
  for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = poly_lr(cfg.optimizer.lr, result.steps, total_steps, cfg.poly_exponent);
    const auto order = data::permutation(n, order_rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < n; start += B) {
      std::vector<data::SegmentationSample> samples;
      for (auto i = start; i < std::min(n, start + B); ++i) {
        auto s = train_set.at(order[i]);
        samples.push_back(cfg.augment ? data::augment(s, aug_rng, cfg.augment_options) : std::move(s));
      }
      const auto batch = data::make_batch(samples, DType::f32);
      Tape tape;
      Tensor loss;
      {
        Tape::Scope scope(tape);
        loss = segmentation_loss(model.forward(batch.images), batch.labels, cfg.loss);
      }
      const double value = loss.item();
      if (!std::isfinite(value))
        throw NonFiniteError("non-finite loss " + fmt(value) + " at step " + std::to_string(result.steps) +
                             " (epoch " + std::to_string(epoch) + ")");
      tape.backward(loss);
      opt.step(poly_lr(cfg.optimizer.lr, result.steps, total_steps, cfg.poly_exponent));
      opt.zero_grad();
      ++result.steps;
      loss_sum += value * static_cast<double>(batch.size);
    }
    rec.train_loss = loss_sum / static_cast<double>(n);
    const auto ev = evaluate(model, val_set, cfg.batch_size, cfg.loss);
    rec.val_loss = ev.loss;
    rec.val_dice = ev.mean_dice;
    result.history.push_back(rec);
    if (rec.val_dice > result.best_val_dice) {
      result.best_val_dice = rec.val_dice;
      result.best_epoch = epoch;
      if (!cfg.out_dir.empty()) save_checkpoint(out("best.ckpt"), model);
    }
    if (!cfg.out_dir.empty()) {
      if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0)
        save_checkpoint(out("epoch_" + std::to_string(epoch) + ".ckpt"), model);
      write_history_csv(out("history.csv"), result.history);
    }
    if (on_epoch) on_epoch(rec);
  }
  if (!cfg.out_dir.empty()) save_checkpoint(out("last.ckpt"), model);
  return result;
}

// ---------------------------------------------------------------- history csv

void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history) {
  std::ofstream o(path);
  if (!o) throw DataError("cannot write '" + path + "'");
  o << "epoch,lr,train_loss,val_loss,val_dice\n";
  for (const auto& r : history)
    o << r.epoch << ',' << fmt(r.lr) << ',' << fmt(r.train_loss) << ',' << fmt(r.val_loss) << ',' << fmt(r.val_dice)
      << '\n';
}

std::vector<EpochRecord> read_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "epoch,lr,train_loss,val_loss,val_dice")
    throw DataError("'" + path + "' is not a training history");
  std::vector<EpochRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[5];
    for (auto& x : f)
      if (!std::getline(ss, x, ',')) throw DataError("'" + path + "': short row '" + line + "'");
    try {
      out.push_back({std::stoll(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
    } catch (const std::exception&) {
      throw DataError("'" + path + "': bad row '" + line + "'");
    }
  }
  return out;
}

}  // namespace nnuzoo::train
