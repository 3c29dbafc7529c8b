// Copyright 2026 The lgbg Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lgbg {

enum class ErrorKind {
  kDimension,
  kParse,
  kVocabulary,
  kValidation,
  kEmbedding,
  kNumeric,
  kRange,
  kUsage,
  kInsufficientData,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this exception. The kind lets the
// CLI map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Input problems (bad files, bad values) as opposed to internal/numeric
  // failures.
  bool is_input_error() const noexcept {
    return kind_ != ErrorKind::kNumeric && kind_ != ErrorKind::kDimension;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace lgbg
