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

#include <stdexcept>
#include <string>

namespace nnuzoo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor shapes, dtypes or geometry.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (non-positive step size, unknown name, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent on-disk data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A statistical test whose null distribution is degenerate.
class UndefinedTestError : public Error {
 public:
  using Error::Error;
};

/// Training diverged.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

}  // namespace nnuzoo
