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

#include "lgbg/graph_builder.hpp"

#include <algorithm>
#include <tuple>

#include "json.hpp"
#include "lgbg/error.hpp"

namespace lgbg {

namespace {

std::vector<ConceptEvent> sorted_copy(std::span<const ConceptEvent> events) {
  std::vector<ConceptEvent> out(events.begin(), events.end());
  std::sort(out.begin(), out.end(), [](const ConceptEvent& x, const ConceptEvent& y) {
    return std::tie(x.start, x.end, x.concept_name) < std::tie(y.start, y.end, y.concept_name);
  });
  return out;
}

}  // namespace

std::string_view edge_kind_name(EdgeKind k) {
  return k == EdgeKind::kHomogeneous ? "homogeneous" : "heterogeneous";
}

EdgeCounts homogeneous_edges(std::span<const ConceptEvent> events) {
  const auto sorted = sorted_copy(events);
  EdgeCounts counts;
  for (std::size_t t = 0; t + 1 < sorted.size(); ++t) {
    const auto& from = sorted[t].concept_name;
    const auto& to = sorted[t + 1].concept_name;
    if (from != to) ++counts[{from, to}];
  }
  return counts;
}

EdgeCounts heterogeneous_edges(StreamType stream_a, std::span<const ConceptEvent> a,
                               StreamType stream_b, std::span<const ConceptEvent> b) {
  if (stream_a == stream_b)
    fail(ErrorKind::kUsage, "heterogeneous_edges: both event lists are from the " +
                                std::string(stream_name(stream_a)) + " stream");
  // Sweep by start time. Each event, when reached, is paired with the events
  // of the other stream that started no later and are still running, so every
  // intersecting pair is counted exactly once.
  struct Item {
    std::int64_t start;
    int side;
    const ConceptEvent* e;
  };
  std::vector<Item> items;
  items.reserve(a.size() + b.size());
  for (const auto& e : a) items.push_back({e.start, 0, &e});
  for (const auto& e : b) items.push_back({e.start, 1, &e});
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& x, const Item& y) { return std::tie(x.start, x.side) < std::tie(y.start, y.side); });

  EdgeCounts counts;
  std::array<std::vector<const ConceptEvent*>, 2> active;
  for (const Item& it : items) {
    auto& other = active[1 - it.side];
    std::erase_if(other, [&](const ConceptEvent* e) { return e->end <= it.start; });
    for (const ConceptEvent* o : other) {
      if (it.side == 0)
        ++counts[{it.e->concept_name, o->concept_name}];
      else
        ++counts[{o->concept_name, it.e->concept_name}];
    }
    active[it.side].push_back(it.e);
  }
  return counts;
}

LocalContextGraph build_local_graph(const DayWindow& window, std::int64_t day_index,
                                    const Vocabulary& vocab, const EmbeddingTable& table) {
  LocalContextGraph g;
  g.day_index = day_index;

  // Canonical node order: stream, then concept name.
  std::map<std::pair<std::size_t, std::string>, std::int64_t> seconds;
  for (StreamType s : kAllStreams)
    for (const auto& e : window.streams[stream_index(s)]) {
      vocab.local_index(s, e.concept_name);
      seconds[{stream_index(s), e.concept_name}] += e.duration();
    }
  std::map<std::pair<std::size_t, std::string>, std::size_t> node_id;
  for (const auto& [key, secs] : seconds) {
    const StreamType s = kAllStreams[key.first];
    const std::size_t gi = vocab.global_index(s, key.second);
    if (!table.contains(gi))
      fail(ErrorKind::kEmbedding, "no embedding for concept '" + key.second + "'");
    node_id[key] = g.nodes.size();
    g.nodes.push_back(NodeRef{s, key.second, static_cast<double>(secs) / 3600.0, gi});
  }

  for (StreamType s : kAllStreams) {
    const std::size_t k = stream_index(s);
    for (const auto& [pair, w] : homogeneous_edges(window.streams[k]))
      g.edges.push_back({node_id.at({k, pair.first}), node_id.at({k, pair.second}),
                         EdgeKind::kHomogeneous, w});
  }
  for (std::size_t ka = 0; ka < kStreamCount; ++ka)
    for (std::size_t kb = ka + 1; kb < kStreamCount; ++kb) {
      const auto counts = heterogeneous_edges(kAllStreams[ka], window.streams[ka],
                                              kAllStreams[kb], window.streams[kb]);
      for (const auto& [pair, w] : counts) {
        const std::size_t i = node_id.at({ka, pair.first});
        const std::size_t j = node_id.at({kb, pair.second});
        g.edges.push_back({i, j, EdgeKind::kHeterogeneous, w});
        g.edges.push_back({j, i, EdgeKind::kHeterogeneous, w});
      }
    }
  std::sort(g.edges.begin(), g.edges.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    return std::tie(x.src, x.dst, x.kind) < std::tie(y.src, y.dst, y.kind);
  });
  return g;
}

std::string graph_to_json(const LocalContextGraph& g, int indent) {
  nlohmann::ordered_json j;
  j["day"] = g.day_index;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    nlohmann::ordered_json node;
    node["stream"] = stream_name(n.stream);
    node["concept"] = n.concept_name;
    node["attribute"] = n.attribute_hours;
    j["nodes"].push_back(std::move(node));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json edge;
    edge["src"] = e.src;
    edge["dst"] = e.dst;
    edge["kind"] = edge_kind_name(e.kind);
    edge["weight"] = e.weight;
    j["edges"].push_back(std::move(edge));
  }
  return j.dump(indent);
}

std::vector<GlobalSample> build_samples(const EventLog& log, const std::map<std::int64_t, int>& labels,
                                        std::size_t span, std::int64_t day_origin,
                                        const Vocabulary& vocab, const EmbeddingTable& table,
                                        const std::string& subject) {
  if (span == 0) fail(ErrorKind::kUsage, "build_samples: span must be at least 1");
  const auto first_span_day = static_cast<std::int64_t>(span) - 1;
  std::map<std::int64_t, LocalContextGraph> cache;
  auto graph_for = [&](std::int64_t day) -> const LocalContextGraph& {
    auto it = cache.find(day);
    if (it == cache.end())
      it = cache.emplace(day, build_local_graph(slice_day(log, day, day_origin), day, vocab, table)).first;
    return it->second;
  };

  std::vector<GlobalSample> samples;
  for (const auto& [day, label] : labels) {
    if (day < first_span_day) continue;
    if (label < 0 || label > 3) fail(ErrorKind::kValidation, "label must be a class in 0..3");
    GlobalSample s;
    s.subject = subject;
    s.anchor_day = day;
    s.label = label;
    for (std::int64_t d = day - first_span_day; d <= day; ++d) s.graphs.push_back(graph_for(d));
    samples.push_back(std::move(s));
  }
  return samples;
}

int quantize_pam(int score) {
  if (score < 1 || score > 16)
    fail(ErrorKind::kValidation, "PAM score " + std::to_string(score) + " is outside 1..16");
  return (score - 1) / 4;
}

}  // namespace lgbg
