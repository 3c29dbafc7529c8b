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
#include <cstddef>
#include <random>
#include <vector>

#include "lgbg/autodiff.hpp"
#include "lgbg/graph_builder.hpp"
#include "lgbg/param_set.hpp"

namespace lgbg {

struct GnnConfig {
  std::size_t node_dim = 50;   // d
  std::size_t edge_dim = 32;   // d_e
  std::size_t rep_dim = 64;    // d_p
  std::size_t layers = 3;      // m
  bool nonlinear = true;       // tanh after each message-passing layer
  bool homogeneous = true;     // homogeneous edge channel on/off (ablation)
  bool heterogeneous = true;   // heterogeneous edge channel on/off (ablation)
};

// A local graph laid out for the model: nodes grouped by stream, attribute
// scaling applied, edge weights normalized over each node's incoming edges of
// the same kind.
struct GraphInput {
  std::size_t node_count = 0;
  std::array<std::size_t, kStreamCount + 1> block{};  // rows [block[k], block[k+1]) are stream k
  std::vector<std::size_t> graph_node;  // internal row -> index in LocalContextGraph::nodes
  Tensor x0;                            // [n x d] attribute-scaled embeddings
  SparseRows homo;                      // alpha over incoming homogeneous edges
  SparseRows hetero;                    // alpha over incoming heterogeneous edges
  std::vector<std::size_t> edge_src;    // internal rows, edges kept by the config
  std::vector<std::size_t> edge_dst;
  std::vector<std::size_t> graph_edge;  // kept edge -> index in LocalContextGraph::edges

  bool empty() const noexcept { return node_count == 0; }
};

// attribute (fraction of the day) x embedding, rows in graph node order.
Tensor apply_attributes(const LocalContextGraph& graph, const EmbeddingTable& table);

GraphInput prepare_graph(const LocalContextGraph& graph, const EmbeddingTable& table,
                         const GnnConfig& config);

struct GnnParamIds {
  struct Layer {
    std::array<ParamId, kStreamCount> self;    // W_x per stream
    std::array<ParamId, kStreamCount> homo;    // W_alpha per stream
    std::array<ParamId, kStreamCount> hetero;  // heterogeneous W_alpha per target stream
  };
  std::vector<Layer> layers;
  ParamId edge_proj = 0;   // W_e   [d_e x 2d]
  ParamId node_query = 0;  // q     [1 x d]
  ParamId edge_query = 0;  // W_beta [d_e x d]
  ParamId rep_proj = 0;    // [d_p x (d_e + d)]
  ParamId empty_day = 0;   // [d_p]
};

GnnParamIds register_gnn_params(ParamSet& params, const GnnConfig& config, std::mt19937_64& rng);
GnnParamIds lookup_gnn_params(const ParamSet& params, const GnnConfig& config);

// One fused update for every node:
//   x_i <- W_x^k x_i + W_a^k sum_j a_ij x_j (homogeneous in-edges)
//              + W_h^k sum_j a_ij x_j (heterogeneous in-edges)
// computed from the pre-update states, optionally followed by tanh.
Var message_passing_layer(Tape& tape, const ParamSet& params, const GnnParamIds::Layer& layer,
                          const GraphInput& input, Var states, const GnnConfig& config);

// e_ij = W_e [x_i ; x_j] for every kept edge -> [edges x d_e].
Var edge_embeddings(Tape& tape, Var states, const GraphInput& input, Var edge_proj);

struct Pooled {
  Var pooled;     // vector
  Var attention;  // weights, sum to one
};

Pooled semantic_pool(Tape& tape, Var states, Var node_query);
Pooled structural_pool(Tape& tape, Var edges, Var semantic, Var edge_query);

struct LocalGraphOutput {
  bool empty = false;
  Var states;          // final node states [n x d]; invalid when empty
  Var semantic;        // g_s [d]
  Var structural;      // g_e [d_e]
  Var concatenated;    // g = [g_e; g_s]
  Var rep;             // projected representation [d_p]
  Var node_attention;  // [n]
  Var edge_attention;  // [edges]; invalid when edgeless
};

LocalGraphOutput local_graph_forward(Tape& tape, const ParamSet& params, const GnnParamIds& ids,
                                     const GraphInput& input, const GnnConfig& config);

}  // namespace lgbg
