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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lgbg/concept_stream.hpp"
#include "lgbg/embedding.hpp"

namespace lgbg {

struct NodeRef {
  StreamType stream = StreamType::kActivity;
  std::string concept_name;
  double attribute_hours = 0.0;
  std::size_t embedding_index = 0;
};

enum class EdgeKind : std::uint8_t { kHomogeneous, kHeterogeneous };

std::string_view edge_kind_name(EdgeKind k);

struct WeightedEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeKind kind = EdgeKind::kHomogeneous;
  std::int64_t weight = 0;
};

// One day's heterogeneous graph. Nodes are in canonical (stream, concept)
// order; edges are sorted by (src, dst, kind).
struct LocalContextGraph {
  std::int64_t day_index = 0;
  std::vector<NodeRef> nodes;
  std::vector<WeightedEdge> edges;

  bool empty() const noexcept { return nodes.empty(); }
};

// (from concept, to concept) -> count
using EdgeCounts = std::map<std::pair<std::string, std::string>, std::int64_t>;

// Directed transition counts between consecutive events of one stream.
// Consecutive repeats of the same concept add nothing.
EdgeCounts homogeneous_edges(std::span<const ConceptEvent> events);

// Co-occurrence counts between events of two different streams: one count per
// pair of events whose intervals intersect (max(start) < min(end)). Keys are
// (concept from `a`, concept from `b`).
EdgeCounts heterogeneous_edges(StreamType stream_a, std::span<const ConceptEvent> a,
                               StreamType stream_b, std::span<const ConceptEvent> b);

LocalContextGraph build_local_graph(const DayWindow& window, std::int64_t day_index,
                                    const Vocabulary& vocab, const EmbeddingTable& table);

std::string graph_to_json(const LocalContextGraph& g, int indent = 2);

struct GlobalSample {
  std::string subject;
  std::int64_t anchor_day = 0;  // last day of the span; the label's day
  std::vector<LocalContextGraph> graphs;
  int label = 0;
};

// One sample per labeled day d >= span - 1, covering days [d - span + 1, d].
std::vector<GlobalSample> build_samples(const EventLog& log, const std::map<std::int64_t, int>& labels,
                                        std::size_t span, std::int64_t day_origin,
                                        const Vocabulary& vocab, const EmbeddingTable& table,
                                        const std::string& subject = {});

// PAM score 1..16 -> valence/arousal quadrant 0..3.
int quantize_pam(int score);

}  // namespace lgbg
