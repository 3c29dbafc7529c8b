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

#include "lgbg/run_config.hpp"

#include <fstream>

#include "lgbg/error.hpp"

namespace lgbg {

namespace {

using ojson = nlohmann::ordered_json;

bool same_kind(const ojson& a, const ojson& b) {
  if (a.is_boolean() || b.is_boolean()) return a.is_boolean() && b.is_boolean();
  if (a.is_number() || b.is_number()) return a.is_number() && b.is_number();
  return a.type() == b.type();
}

}  // namespace

RunConfig::RunConfig() {
  const TrainConfig t;
  const GnnConfig& g = t.model.gnn;
  values_ = ojson{
      {"model.node_dim", g.node_dim},
      {"model.edge_dim", g.edge_dim},
      {"model.rep_dim", g.rep_dim},
      {"model.attn_dim", t.model.attn_dim},
      {"model.layers", g.layers},
      {"model.nonlinear", g.nonlinear},
      {"model.homogeneous", g.homogeneous},
      {"model.heterogeneous", g.heterogeneous},
      {"model.max_positions", t.model.max_positions},
      {"train.lambda", t.lambda},
      {"train.learning_rate", t.learning_rate},
      {"train.epochs", t.epochs},
      {"train.batch_size", t.batch_size},
      {"train.patience", t.patience},
      {"train.min_delta", t.min_delta},
      {"train.val_fraction", t.val_fraction},
      {"train.seed", t.seed},
      {"train.span", t.span},
      {"train.splits", t.splits},
      {"train.parallel", t.parallel},
      {"embedding.path", ""},
      {"embedding.seed", std::uint64_t{0}},
      {"grade.k", std::size_t{3}},
  };
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config file " + path.string());
  ojson j = ojson::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kParse, "config file " + path.string() + " is not valid JSON");
  RunConfig rc;
  rc.merge(j);
  return rc;
}

void RunConfig::merge(const ojson& flat) {
  if (!flat.is_object()) fail(ErrorKind::kValidation, "config must be a JSON object of dotted keys");
  for (auto it = flat.begin(); it != flat.end(); ++it) set(it.key(), it.value());
}

void RunConfig::set(std::string_view key, const ojson& value) {
  const std::string k(key);
  if (!values_.contains(k)) fail(ErrorKind::kValidation, "unknown config key '" + k + "'");
  ojson& slot = values_[k];
  if (!same_kind(slot, value))
    fail(ErrorKind::kValidation, "config key '" + k + "' expects a " + std::string(slot.type_name()) + ", got " +
                                     value.dump());
  if (slot.is_number_unsigned() && !(value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0)))
    fail(ErrorKind::kValidation, "config key '" + k + "' expects a non-negative integer, got " + value.dump());
  slot = slot.is_number_unsigned() ? ojson(value.get<std::uint64_t>())
         : slot.is_number_float()  ? ojson(value.get<double>())
                                   : value;
}

const ojson& RunConfig::at(std::string_view key) const {
  const std::string k(key);
  if (!values_.contains(k)) fail(ErrorKind::kValidation, "unknown config key '" + k + "'");
  return values_.at(k);
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  GnnConfig& g = t.model.gnn;
  g.node_dim = get<std::size_t>("model.node_dim");
  g.edge_dim = get<std::size_t>("model.edge_dim");
  g.rep_dim = get<std::size_t>("model.rep_dim");
  g.layers = get<std::size_t>("model.layers");
  g.nonlinear = get<bool>("model.nonlinear");
  g.homogeneous = get<bool>("model.homogeneous");
  g.heterogeneous = get<bool>("model.heterogeneous");
  t.model.attn_dim = get<std::size_t>("model.attn_dim");
  t.model.max_positions = get<std::size_t>("model.max_positions");
  t.lambda = get<double>("train.lambda");
  t.learning_rate = get<double>("train.learning_rate");
  t.epochs = get<std::size_t>("train.epochs");
  t.batch_size = get<std::size_t>("train.batch_size");
  t.patience = get<std::size_t>("train.patience");
  t.min_delta = get<double>("train.min_delta");
  t.val_fraction = get<double>("train.val_fraction");
  t.seed = get<std::uint64_t>("train.seed");
  t.span = get<std::size_t>("train.span");
  t.splits = get<std::size_t>("train.splits");
  t.parallel = get<bool>("train.parallel");
  t.validate();
  return t;
}

}  // namespace lgbg
