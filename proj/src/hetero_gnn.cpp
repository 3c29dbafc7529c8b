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

#include "lgbg/hetero_gnn.hpp"

#include <algorithm>
#include <string>

#include "lgbg/error.hpp"

namespace lgbg {

namespace {

std::string layer_key(std::size_t layer, StreamType s, const char* role) {
  return "gnn.layer" + std::to_string(layer) + "." + std::string(stream_name(s)) + "." + role;
}

// Row-normalized incoming weights: row dst lists (src, w / sum of w into dst).
SparseRows normalized_incoming(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const std::vector<double>& weights) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  for (std::size_t e = 0; e < pairs.size(); ++e) rows[pairs[e].second].emplace_back(pairs[e].first, weights[e]);
  SparseRows s;
  s.n_rows = n;
  s.n_cols = n;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    double total = 0.0;
    for (const auto& [src, w] : r) total += w;
    for (const auto& [src, w] : r) {
      s.col.push_back(src);
      s.val.push_back(w / total);
    }
    s.row_ptr.push_back(s.col.size());
  }
  return s;
}

}  // namespace

Tensor apply_attributes(const LocalContextGraph& graph, const EmbeddingTable& table) {
  if (graph.nodes.empty()) fail(ErrorKind::kDimension, "apply_attributes: graph has no nodes");
  const std::size_t d = table.dim();
  Tensor x({graph.nodes.size(), d});
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& node = graph.nodes[i];
    const auto emb = table.row(node.embedding_index);
    const double a = node.attribute_hours / 24.0;
    for (std::size_t c = 0; c < d; ++c) x.at(i, c) = a * emb[c];
  }
  return x;
}

GraphInput prepare_graph(const LocalContextGraph& graph, const EmbeddingTable& table,
                         const GnnConfig& config) {
  if (table.dim() != config.node_dim)
    fail(ErrorKind::kDimension, "embedding dimension " + std::to_string(table.dim()) +
                                    " does not match node dimension " + std::to_string(config.node_dim));
  GraphInput in;
  in.node_count = graph.nodes.size();
  if (in.empty()) return in;

  // Group rows by stream, keeping the graph's order inside each group.
  std::vector<std::size_t> internal(graph.nodes.size());
  for (std::size_t k = 0; k < kStreamCount; ++k) {
    in.block[k] = in.graph_node.size();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
      if (stream_index(graph.nodes[i].stream) == k) {
        internal[i] = in.graph_node.size();
        in.graph_node.push_back(i);
      }
  }
  in.block[kStreamCount] = in.graph_node.size();

  const Tensor scaled = apply_attributes(graph, table);
  in.x0 = Tensor({in.node_count, config.node_dim});
  for (std::size_t r = 0; r < in.node_count; ++r)
    std::copy(scaled.row(in.graph_node[r]).begin(), scaled.row(in.graph_node[r]).end(), in.x0.row(r).begin());

  std::vector<std::pair<std::size_t, std::size_t>> homo_pairs, het_pairs;
  std::vector<double> homo_w, het_w;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    const bool homo = edge.kind == EdgeKind::kHomogeneous;
    if (homo ? !config.homogeneous : !config.heterogeneous) continue;
    const std::size_t s = internal.at(edge.src), t = internal.at(edge.dst);
    (homo ? homo_pairs : het_pairs).emplace_back(s, t);
    (homo ? homo_w : het_w).push_back(static_cast<double>(edge.weight));
    in.edge_src.push_back(s);
    in.edge_dst.push_back(t);
    in.graph_edge.push_back(e);
  }
  in.homo = normalized_incoming(in.node_count, homo_pairs, homo_w);
  in.hetero = normalized_incoming(in.node_count, het_pairs, het_w);
  return in;
}

GnnParamIds register_gnn_params(ParamSet& params, const GnnConfig& config, std::mt19937_64& rng) {
  const std::size_t d = config.node_dim, de = config.edge_dim, dp = config.rep_dim;
  if (d == 0 || de == 0 || dp == 0) fail(ErrorKind::kUsage, "model dimensions must be positive");
  GnnParamIds ids;
  for (std::size_t l = 0; l < config.layers; ++l) {
    GnnParamIds::Layer layer{};
    for (StreamType s : kAllStreams) {
      const auto k = stream_index(s);
      layer.self[k] = params.add(layer_key(l, s, "self"), glorot_uniform(d, d, rng));
      layer.homo[k] = params.add(layer_key(l, s, "homo"), glorot_uniform(d, d, rng));
      layer.hetero[k] = params.add(layer_key(l, s, "hetero"), glorot_uniform(d, d, rng));
    }
    ids.layers.push_back(layer);
  }
  ids.edge_proj = params.add("gnn.edge_proj", glorot_uniform(de, 2 * d, rng));
  ids.node_query = params.add("gnn.node_query", glorot_uniform(1, d, rng));
  ids.edge_query = params.add("gnn.edge_query", glorot_uniform(de, d, rng));
  ids.rep_proj = params.add("gnn.rep_proj", glorot_uniform(dp, de + d, rng));
  ids.empty_day = params.add("gnn.empty_day", Tensor({dp}, 0.0));
  return ids;
}

GnnParamIds lookup_gnn_params(const ParamSet& params, const GnnConfig& config) {
  GnnParamIds ids;
  for (std::size_t l = 0; l < config.layers; ++l) {
    GnnParamIds::Layer layer{};
    for (StreamType s : kAllStreams) {
      const auto k = stream_index(s);
      layer.self[k] = params.id(layer_key(l, s, "self"));
      layer.homo[k] = params.id(layer_key(l, s, "homo"));
      layer.hetero[k] = params.id(layer_key(l, s, "hetero"));
    }
    ids.layers.push_back(layer);
  }
  ids.edge_proj = params.id("gnn.edge_proj");
  ids.node_query = params.id("gnn.node_query");
  ids.edge_query = params.id("gnn.edge_query");
  ids.rep_proj = params.id("gnn.rep_proj");
  ids.empty_day = params.id("gnn.empty_day");
  return ids;
}

Var message_passing_layer(Tape& tape, const ParamSet& params, const GnnParamIds::Layer& layer,
                          const GraphInput& input, Var states, const GnnConfig& config) {
  const bool has_homo = input.homo.nnz() > 0;
  const bool has_het = input.hetero.nnz() > 0;
  const Var homo_msg = has_homo ? tape.spmm(input.homo, states) : Var{};
  const Var het_msg = has_het ? tape.spmm(input.hetero, states) : Var{};

  std::vector<Var> parts;
  for (std::size_t k = 0; k < kStreamCount; ++k) {
    const std::size_t b = input.block[k], e = input.block[k + 1];
    if (b == e) continue;
    // A single-stream graph needs no slicing.
    const bool all = b == 0 && e == input.node_count;
    auto rows = [&](Var v) { return all ? v : tape.slice_rows(v, b, e); };
    Var out = tape.linear(rows(states), tape.parameter(params, layer.self[k]));
    if (has_homo) out = tape.add(out, tape.linear(rows(homo_msg), tape.parameter(params, layer.homo[k])));
    if (has_het) out = tape.add(out, tape.linear(rows(het_msg), tape.parameter(params, layer.hetero[k])));
    parts.push_back(out);
  }
  Var next = parts.size() == 1 ? parts.front() : tape.concat_rows(parts);
  return config.nonlinear ? tape.tanh(next) : next;
}

Var edge_embeddings(Tape& tape, Var states, const GraphInput& input, Var edge_proj) {
  if (input.edge_src.empty()) fail(ErrorKind::kDimension, "edge_embeddings: graph has no edges");
  const Var pairs = tape.concat_cols(tape.gather_rows(states, input.edge_src),
                                     tape.gather_rows(states, input.edge_dst));
  return tape.linear(pairs, edge_proj);
}

Pooled semantic_pool(Tape& tape, Var states, Var node_query) {
  const std::size_t n = tape.value(states).rows();
  const Var scores = tape.reshape(tape.linear(states, node_query), {n});
  const Var beta = tape.softmax(scores);
  const Var pooled = tape.matmul(tape.reshape(beta, {1, n}), states);
  return {tape.reshape(pooled, {tape.value(states).cols()}), beta};
}

Pooled structural_pool(Tape& tape, Var edges, Var semantic, Var edge_query) {
  const std::size_t n = tape.value(edges).rows();
  const std::size_t de = tape.value(edges).cols();
  const Var query = tape.reshape(tape.linear(semantic, edge_query), {1, de});
  const Var scores = tape.reshape(tape.linear(edges, query), {n});
  const Var beta = tape.softmax(scores);
  const Var pooled = tape.matmul(tape.reshape(beta, {1, n}), edges);
  return {tape.reshape(pooled, {de}), beta};
}

LocalGraphOutput local_graph_forward(Tape& tape, const ParamSet& params, const GnnParamIds& ids,
                                     const GraphInput& input, const GnnConfig& config) {
  LocalGraphOutput out;
  if (input.empty()) {
    out.empty = true;
    out.rep = tape.parameter(params, ids.empty_day);
    return out;
  }
  Var x = tape.constant(input.x0);
  for (std::size_t l = 0; l < config.layers; ++l)
    x = message_passing_layer(tape, params, ids.layers.at(l), input, x, config);
  out.states = x;

  const Pooled sem = semantic_pool(tape, x, tape.parameter(params, ids.node_query));
  out.semantic = sem.pooled;
  out.node_attention = sem.attention;

  if (input.edge_src.empty()) {
    out.structural = tape.constant(Tensor({config.edge_dim}, 0.0));
  } else {
    const Var e = edge_embeddings(tape, x, input, tape.parameter(params, ids.edge_proj));
    const Pooled st = structural_pool(tape, e, sem.pooled, tape.parameter(params, ids.edge_query));
    out.structural = st.pooled;
    out.edge_attention = st.attention;
  }
  const std::array<Var, 2> parts{out.structural, out.semantic};
  out.concatenated = tape.concat(parts);
  out.rep = tape.linear(out.concatenated, tape.parameter(params, ids.rep_proj));
  return out;
}

}  // namespace lgbg
