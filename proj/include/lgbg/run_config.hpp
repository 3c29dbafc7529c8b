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

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lgbg/trainer.hpp"

namespace lgbg {

// Effective configuration of a run: flat dotted keys ("model.layers",
// "train.lambda", ...). Starts from defaults; a config file and then flag
// overrides are merged on top. Unknown keys and type mismatches are
// validation errors.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_file(const std::filesystem::path& path);
  void merge(const nlohmann::ordered_json& flat);
  void set(std::string_view key, const nlohmann::ordered_json& value);

  const nlohmann::ordered_json& values() const noexcept { return values_; }
  const nlohmann::ordered_json& at(std::string_view key) const;

  template <typename T>
  T get(std::string_view key) const {
    return at(key).get<T>();
  }

  TrainConfig train_config() const;
  std::string dump() const { return values_.dump(2); }

 private:
  nlohmann::ordered_json values_;
};

}  // namespace lgbg
