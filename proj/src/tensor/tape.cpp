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

#include "nnuzoo/tensor/tape.hpp"

#include <atomic>

#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo {

namespace {

thread_local Tape* g_active = nullptr;
std::atomic<std::uint64_t> g_next_tape_id{1};

Tensor accumulate(const Tensor& acc, const Tensor& g) {
  if (!acc.defined()) return g;
  return ops::add(acc, g);
}

}  // namespace

Tensor GradMap::operator[](const Tensor& leaf) const {
  auto it = grads_.find(leaf.impl());
  if (it == grads_.end()) return Tensor();
  return it->second;
}

bool GradMap::contains(const Tensor& leaf) const { return grads_.count(leaf.impl()) != 0; }

Tape::Tape() : id_(g_next_tape_id++) {}

Tape::Scope::Scope(Tape& tape) : previous_(g_active) { g_active = &tape; }
Tape::Scope::~Scope() { g_active = previous_; }

Tape::Pause::Pause() : previous_(g_active) { g_active = nullptr; }
Tape::Pause::~Pause() { g_active = previous_; }

Tape* Tape::active() { return g_active; }

bool Tape::on_tape(const Tensor& t) const {
  return t.defined() && t.impl()->tape_id == id_ && t.impl()->tape_slot >= 0;
}

bool Tape::tracks(const Tensor& t) const { return t.defined() && (t.requires_grad() || on_tape(t)); }

std::int64_t Tape::slot_of(const Tensor& t) {
  if (on_tape(t)) return t.impl()->tape_slot;
  if (!t.requires_grad()) return -1;
  auto [it, inserted] = leaf_slots_.try_emplace(t.impl(), next_slot_);
  if (inserted) {
    ++next_slot_;
    leaves_.push_back(t);
  }
  return it->second;
}

void Tape::record(std::string op, std::span<const Tensor> inputs, Tensor& out, BackwardFn fn) {
  Node node;
  node.op = std::move(op);
  node.input_slots.reserve(inputs.size());
  for (const auto& in : inputs) node.input_slots.push_back(slot_of(in));
  node.output_slot = next_slot_++;
  node.backward = std::move(fn);
  out.impl()->tape_id = id_;
  out.impl()->tape_slot = node.output_slot;
  nodes_.push_back(std::move(node));
}

GradMap Tape::backward(const Tensor& loss, bool retain) {
  if (!loss.defined() || loss.numel() != 1)
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  if (!on_tape(loss)) throw ValueError("backward: loss was not recorded on this tape");

  Pause pause;
  std::vector<Tensor> grads(static_cast<std::size_t>(next_slot_));
  grads[loss.impl()->tape_slot] = Tensor::ones(loss.shape(), loss.dtype());

  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Tensor g = std::move(grads[it->output_slot]);
    if (!g.defined()) continue;
    std::vector<bool> needs(it->input_slots.size());
    bool any = false;
    for (std::size_t i = 0; i < needs.size(); ++i) {
      needs[i] = it->input_slots[i] >= 0;
      any = any || needs[i];
    }
    if (!any) continue;
    auto input_grads = it->backward(g, needs);
    for (std::size_t i = 0; i < needs.size(); ++i) {
      if (!needs[i] || i >= input_grads.size() || !input_grads[i].defined()) continue;
      auto& slot = grads[it->input_slots[i]];
      slot = accumulate(slot, input_grads[i]);
    }
    if (!retain) it->backward = nullptr;
  }

  GradMap result;
  for (auto& leaf : leaves_) {
    const auto slot = leaf_slots_.at(leaf.impl());
    const Tensor& g = grads[slot];
    if (!g.defined()) continue;
    Tensor total = accumulate(leaf.grad(), g);
    leaf.set_grad(total);
    result.grads_[leaf.impl()] = g;
  }
  if (!retain) clear();
  return result;
}

void Tape::clear() {
  nodes_.clear();
  leaf_slots_.clear();
  leaves_.clear();
  next_slot_ = 0;
  // Outputs still referencing this tape become stale; give the tape a new id
  // so they are no longer considered recorded.
  id_ = g_next_tape_id++;
}

GradMap backward(Tape& tape, const Tensor& loss, bool retain) { return tape.backward(loss, retain); }

}  // namespace nnuzoo
