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
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nnuzoo/tensor/tensor.hpp"

namespace nnuzoo {

using AttrValue = std::variant<std::int64_t, double, bool, std::vector<std::int64_t>>;

/// Named attributes of a primitive application.
class Attrs {
 public:
  Attrs() = default;
  Attrs(std::initializer_list<std::pair<const std::string, AttrValue>> init) : values_(init) {}

  Attrs& set(const std::string& key, AttrValue value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, AttrValue>& values() const { return values_; }

  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& key,
                                     std::vector<std::int64_t> fallback) const;

 private:
  std::map<std::string, AttrValue> values_;
};

/// Dispatches a primitive by name. Throws ValueError for unknown names and
/// for missing attributes.
Tensor apply_primitive(const std::string& op_id, const std::vector<Tensor>& inputs,
                       const Attrs& attrs = {});

/// Names accepted by apply_primitive, sorted.
std::vector<std::string> primitive_names();

}  // namespace nnuzoo
