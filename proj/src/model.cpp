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

#include "lgbg/model.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "lgbg/error.hpp"

namespace lgbg {

using nlohmann::json;

nlohmann::json model_config_to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["node_dim"] = c.gnn.node_dim;
  j["edge_dim"] = c.gnn.edge_dim;
  j["rep_dim"] = c.gnn.rep_dim;
  j["layers"] = c.gnn.layers;
  j["nonlinear"] = c.gnn.nonlinear;
  j["homogeneous"] = c.gnn.homogeneous;
  j["heterogeneous"] = c.gnn.heterogeneous;
  j["attn_dim"] = c.temporal().attn_dim;
  j["max_positions"] = c.max_positions;
  return json(j);
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.gnn.node_dim = j.at("node_dim").get<std::size_t>();
    c.gnn.edge_dim = j.at("edge_dim").get<std::size_t>();
    c.gnn.rep_dim = j.at("rep_dim").get<std::size_t>();
    c.gnn.layers = j.at("layers").get<std::size_t>();
    c.gnn.nonlinear = j.at("nonlinear").get<bool>();
    c.gnn.homogeneous = j.at("homogeneous").get<bool>();
    c.gnn.heterogeneous = j.at("heterogeneous").get<bool>();
    c.attn_dim = j.at("attn_dim").get<std::size_t>();
    c.max_positions = j.at("max_positions").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("model config: ") + e.what());
  }
  return c;
}

Model Model::create(const ModelConfig& config, std::uint64_t seed) {
  Model m;
  m.config_ = config;
  std::mt19937_64 rng(seed);
  m.gnn_ids_ = register_gnn_params(m.params_, config.gnn, rng);
  m.temporal_ids_ = register_temporal_params(m.params_, config.temporal(), rng);
  return m;
}

Model Model::from_params(const ModelConfig& config, ParamSet params) {
  Model m;
  m.config_ = config;
  m.params_ = std::move(params);
  m.gnn_ids_ = lookup_gnn_params(m.params_, config.gnn);
  m.temporal_ids_ = lookup_temporal_params(m.params_);
  return m;
}

SampleForward Model::forward(Tape& tape, std::span<const GraphInput* const> days) const {
  SampleForward out;
  std::vector<Var> reps;
  std::vector<Var> states;
  for (const GraphInput* day : days) {
    out.locals.push_back(local_graph_forward(tape, params_, gnn_ids_, *day, config_.gnn));
    reps.push_back(out.locals.back().rep);
    if (!out.locals.back().empty) states.push_back(out.locals.back().states);
  }
  out.global = global_self_attention(tape, params_, temporal_ids_, reps, config_.temporal());
  out.probs = classify(tape, params_, temporal_ids_, out.global.g_star);
  if (!states.empty()) out.node_states = states.size() == 1 ? states.front() : tape.concat_rows(states);
  return out;
}

std::array<double, kClassCount> Model::predict(std::span<const GraphInput* const> days) const {
  Tape tape(false);
  const auto fwd = forward(tape, days);
  std::array<double, kClassCount> p{};
  const auto& v = tape.value(fwd.probs);
  for (std::size_t c = 0; c < kClassCount; ++c) p[c] = v[c];
  return p;
}

std::vector<double> Model::global_representation(std::span<const GraphInput* const> days) const {
  Tape tape(false);
  const auto fwd = forward(tape, days);
  const auto& v = tape.value(fwd.global.g_star);
  return {v.data().begin(), v.data().end()};
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["kind"] = "lgbg-checkpoint";
  j["config"] = ck.run_config;
  j["model"] = model_config_to_json(ck.model.config());
  j["vocab_hash"] = hex64(ck.vocab.hash());
  j["vocabulary"] = json::parse(ck.vocab.to_json_text());
  nlohmann::ordered_json emb;
  emb["dim"] = ck.table.dim();
  emb["rows"] = ck.table.rows().values();
  std::vector<std::string> sources;
  for (auto s : ck.table.sources())
    sources.emplace_back(s == EmbeddingSource::kFile ? "file" : s == EmbeddingSource::kFallback ? "fallback" : "missing");
  emb["sources"] = sources;
  j["embeddings"] = emb;
  nlohmann::ordered_json params;
  const ParamSet& ps = ck.model.params();
  for (ParamId i = 0; i < ps.size(); ++i) {
    nlohmann::ordered_json p;
    p["shape"] = ps.value(i).shape();
    p["data"] = ps.value(i).values();
    params[ps.name(i)] = p;
  }
  j["params"] = params;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  if (j.value("format", 0) != 1 || j.value("kind", "") != "lgbg-checkpoint")
    fail(ErrorKind::kParse, path.string() + ": not a format-1 checkpoint");
  try {
    Vocabulary vocab = Vocabulary::from_json_text(j.at("vocabulary").dump());
    if (j.at("vocab_hash").get<std::string>() != hex64(vocab.hash()))
      fail(ErrorKind::kValidation, path.string() + ": vocabulary hash mismatch");
    const ModelConfig config = model_config_from_json(json::parse(j.at("model").dump()));
    const auto& emb = j.at("embeddings");
    const auto dim = emb.at("dim").get<std::size_t>();
    auto rows = emb.at("rows").get<std::vector<double>>();
    std::vector<EmbeddingSource> sources;
    for (const auto& s : emb.at("sources"))
      sources.push_back(s == "file" ? EmbeddingSource::kFile
                                    : s == "fallback" ? EmbeddingSource::kFallback : EmbeddingSource::kMissing);
    const std::size_t n = sources.size();
    EmbeddingTable table = EmbeddingTable::from_rows(Tensor({n, dim}, std::move(rows)), std::move(sources));
    ParamSet params;
    for (const auto& [name, p] : j.at("params").items())
      params.add(name, Tensor(p.at("shape").get<Shape>(), p.at("data").get<std::vector<double>>()));
    Model model = Model::from_params(config, std::move(params));
    return Checkpoint{std::move(model), std::move(vocab), std::move(table), json::parse(j.at("config").dump())};
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace lgbg
