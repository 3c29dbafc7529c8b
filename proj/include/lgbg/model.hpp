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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "lgbg/concept_stream.hpp"
#include "lgbg/embedding.hpp"
#include "lgbg/hetero_gnn.hpp"
#include "lgbg/temporal_model.hpp"

namespace lgbg {

struct ModelConfig {
  GnnConfig gnn;
  std::size_t attn_dim = 0;  // 0: same as gnn.rep_dim
  std::size_t max_positions = 16;

  TemporalConfig temporal() const {
    return {gnn.rep_dim, attn_dim ? attn_dim : gnn.rep_dim, max_positions};
  }
};

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct SampleForward {
  std::vector<LocalGraphOutput> locals;
  GlobalRep global;
  Var probs;
  Var node_states;  // final states of every node in the sample; invalid if all days are empty
};

// Local graph encoder shared across days, temporal attention, class head.
class Model {
 public:
  static Model create(const ModelConfig& config, std::uint64_t seed);
  static Model from_params(const ModelConfig& config, ParamSet params);

  const ModelConfig& config() const noexcept { return config_; }
  const ParamSet& params() const noexcept { return params_; }
  ParamSet& params() noexcept { return params_; }
  const GnnParamIds& gnn_ids() const noexcept { return gnn_ids_; }
  const TemporalParamIds& temporal_ids() const noexcept { return temporal_ids_; }

  SampleForward forward(Tape& tape, std::span<const GraphInput* const> days) const;
  std::array<double, kClassCount> predict(std::span<const GraphInput* const> days) const;
  std::vector<double> global_representation(std::span<const GraphInput* const> days) const;

 private:
  ModelConfig config_;
  ParamSet params_;
  GnnParamIds gnn_ids_;
  TemporalParamIds temporal_ids_;
};

struct Checkpoint {
  Model model;
  Vocabulary vocab;
  EmbeddingTable table;
  nlohmann::json run_config;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lgbg
