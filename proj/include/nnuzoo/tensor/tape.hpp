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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo {

/// Computes the gradient contribution for every input of a recorded op.
/// `needs[i]` is false for inputs that do not require gradients; their
/// entries may be left undefined.
using BackwardFn =
    std::function<std::vector<Tensor>(const Tensor& grad_out, const std::vector<bool>& needs)>;

/// Gradients keyed by leaf tensor.
class GradMap {
 public:
  Tensor operator[](const Tensor& leaf) const;
  bool contains(const Tensor& leaf) const;
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Tape;
  std::unordered_map<const detail::TensorImpl*, Tensor> grads_;
};

/// Ordered record of primitive applications for reverse-mode differentiation.
///
/// A tape is single-owner and single-threaded. Ops record onto the tape made
/// active by a `Tape::Scope` on the calling thread; without an active tape
/// nothing is recorded.
class Tape {
 public:
  struct Node {
    std::string op;
    std::vector<std::int64_t> input_slots;  // -1 for untracked inputs
    std::int64_t output_slot = -1;
    BackwardFn backward;
  };

  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  /// Suspends recording on this thread for its lifetime.
  class Pause {
   public:
    Pause();
    ~Pause();
    Pause(const Pause&) = delete;
    Pause& operator=(const Pause&) = delete;

   private:
    Tape* previous_;
  };

  static Tape* active();

  std::uint64_t id() const { return id_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  bool tracks(const Tensor& t) const;
  bool on_tape(const Tensor& t) const;

  /// Appends a node; `out` is bound to a fresh slot.
  void record(std::string op, std::span<const Tensor> inputs, Tensor& out, BackwardFn fn);

  /// Reverse sweep from scalar `loss`. Gradients of requires-grad leaves are
  /// accumulated into their `grad()` and also returned. Unless `retain` is
  /// set the tape is cleared afterwards.
  GradMap backward(const Tensor& loss, bool retain = false);

  void clear();

 private:
  std::int64_t slot_of(const Tensor& t);

  std::uint64_t id_;
  std::int64_t next_slot_ = 0;
  std::vector<Node> nodes_;
  std::unordered_map<const detail::TensorImpl*, std::int64_t> leaf_slots_;
  std::vector<Tensor> leaves_;
};

/// Convenience wrapper: `tape.backward(loss)`.
GradMap backward(Tape& tape, const Tensor& loss, bool retain = false);

}  // namespace nnuzoo
