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

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lgbg/error.hpp"
#include "lgbg/hetero_gnn.hpp"
#include "lgbg/model_check.hpp"
#include "lgbg/trainer.hpp"

using namespace lgbg;

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

const Vocabulary& vocab() {
  static const Vocabulary v = Vocabulary::with_locations({"dorm", "library", "gym", "cafe", "lab"});
  return v;
}

Mat as_mat(const Tensor& t) {
  Mat m(t.rows(), Vec(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t.at(r, c);
  return m;
}

Vec mul(const Mat& w, const Vec& x) {
  Vec y(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += w[r][c] * x[c];
  return y;
}

Vec softmax(const Vec& z) {
  const double m = *std::max_element(z.begin(), z.end());
  Vec p(z.size());
  double s = 0;
  for (std::size_t i = 0; i < z.size(); ++i) s += p[i] = std::exp(z[i] - m);
  for (auto& v : p) v /= s;
  return p;
}

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

// Random graph with nodes in canonical order and arbitrary positive weights.
LocalContextGraph random_graph(std::mt19937_64& rng, std::size_t max_per_stream, double edge_prob) {
  LocalContextGraph g;
  for (StreamType s : kAllStreams) {
    const auto& names = vocab().concepts(s);
    const std::size_t n = rng() % (max_per_stream + 1);
    for (std::size_t i = 0; i < std::min(n, names.size()); ++i)
      g.nodes.push_back({s, names[i], 0.25 + static_cast<double>(rng() % 900) / 100.0, vocab().global_index(s, names[i])});
  }
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t a = 0; a < g.nodes.size(); ++a)
    for (std::size_t b = 0; b < g.nodes.size(); ++b) {
      if (a == b || u(rng) > edge_prob) continue;
      const auto kind = g.nodes[a].stream == g.nodes[b].stream ? EdgeKind::kHomogeneous : EdgeKind::kHeterogeneous;
      g.edges.push_back({a, b, kind, 1 + static_cast<std::int64_t>(rng() % 5)});
    }
  return g;
}

struct DenseOut {
  Mat states;
  Vec semantic, structural, rep, node_attention, edge_attention;
};

// Straight-line evaluation over the graph's own node order.
DenseOut dense_forward(const LocalContextGraph& g, const EmbeddingTable& table, const ParamSet& p,
                       const GnnConfig& cfg) {
  const std::size_t n = g.nodes.size();
  Mat x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = table.row(g.nodes[i].embedding_index);
    for (double v : row) x[i].push_back(v * g.nodes[i].attribute_hours / 24.0);
  }
  const auto keep = [&](const WeightedEdge& e) {
    return e.kind == EdgeKind::kHomogeneous ? cfg.homogeneous : cfg.heterogeneous;
  };
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    Mat next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string prefix = "gnn.layer" + std::to_string(l) + "." + std::string(stream_name(g.nodes[i].stream));
      Vec agg_homo(cfg.node_dim, 0.0), agg_het(cfg.node_dim, 0.0);
      double w_homo = 0, w_het = 0;
      for (const auto& e : g.edges)
        if (e.dst == i && keep(e)) (e.kind == EdgeKind::kHomogeneous ? w_homo : w_het) += static_cast<double>(e.weight);
      for (const auto& e : g.edges) {
        if (e.dst != i || !keep(e)) continue;
        const bool homo = e.kind == EdgeKind::kHomogeneous;
        const double a = static_cast<double>(e.weight) / (homo ? w_homo : w_het);
        for (std::size_t c = 0; c < cfg.node_dim; ++c) (homo ? agg_homo : agg_het)[c] += a * x[e.src][c];
      }
      const Vec s = mul(as_mat(p.value(p.id(prefix + ".self"))), x[i]);
      const Vec h = mul(as_mat(p.value(p.id(prefix + ".homo"))), agg_homo);
      const Vec t = mul(as_mat(p.value(p.id(prefix + ".hetero"))), agg_het);
      for (std::size_t c = 0; c < cfg.node_dim; ++c) {
        const double v = s[c] + h[c] + t[c];
        next[i].push_back(cfg.nonlinear ? std::tanh(v) : v);
      }
    }
    x = next;
  }
  DenseOut out;
  out.states = x;
  const Vec q = p.value(p.id("gnn.node_query")).values();
  Vec scores;
  for (const auto& xi : x) scores.push_back(dot(q, xi));
  out.node_attention = softmax(scores);
  out.semantic.assign(cfg.node_dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < cfg.node_dim; ++c) out.semantic[c] += out.node_attention[i] * x[i][c];

  out.structural.assign(cfg.edge_dim, 0.0);
  Mat edges;
  const Mat we = as_mat(p.value(p.id("gnn.edge_proj")));
  for (const auto& e : g.edges) {
    if (!keep(e)) continue;
    Vec cat = x[e.src];
    cat.insert(cat.end(), x[e.dst].begin(), x[e.dst].end());
    edges.push_back(mul(we, cat));
  }
  if (!edges.empty()) {
    const Vec query = mul(as_mat(p.value(p.id("gnn.edge_query"))), out.semantic);
    Vec es;
    for (const auto& e : edges) es.push_back(dot(query, e));
    out.edge_attention = softmax(es);
    for (std::size_t k = 0; k < edges.size(); ++k)
      for (std::size_t c = 0; c < cfg.edge_dim; ++c) out.structural[c] += out.edge_attention[k] * edges[k][c];
  }
  Vec g_cat = out.structural;
  g_cat.insert(g_cat.end(), out.semantic.begin(), out.semantic.end());
  out.rep = mul(as_mat(p.value(p.id("gnn.rep_proj"))), g_cat);
  return out;
}

struct Harness {
  GnnConfig cfg;
  EmbeddingTable table;
  ParamSet params;
  GnnParamIds ids;

  explicit Harness(GnnConfig c, std::uint64_t seed = 1) : cfg(c), table(EmbeddingTable::fallback(vocab(), c.node_dim, seed)) {
    std::mt19937_64 rng(seed);
    ids = register_gnn_params(params, cfg, rng);
  }

  LocalGraphOutput run(Tape& tape, const GraphInput& in) const { return local_graph_forward(tape, params, ids, in, cfg); }
};

void check_close(std::span<const double> got, const Vec& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::fabs(got[i] - want[i]) <= tol);
}

GnnConfig small_config() {
  GnnConfig c;
  c.node_dim = 6;
  c.edge_dim = 4;
  c.rep_dim = 5;
  c.layers = 2;
  return c;
}

}  // namespace

TEST_SUITE("hetero_gnn") {
  TEST_CASE("apply_attributes scales embeddings by the fraction of the day") {
    const auto table = EmbeddingTable::fallback(vocab(), 6, 2);
    std::mt19937_64 rng(1);
    const auto g = random_graph(rng, 3, 0.0);
    const auto x = apply_attributes(g, table);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const auto e = table.row(g.nodes[i].embedding_index);
      for (std::size_t c = 0; c < 6; ++c)
        if (std::fabs(e[c]) > 1e-9) CHECK(x.at(i, c) / e[c] == doctest::Approx(g.nodes[i].attribute_hours / 24.0).epsilon(1e-12));
    }
    LocalContextGraph full{0, {{StreamType::kAudio, "voice", 24.0, vocab().global_index(StreamType::kAudio, "voice")}}, {}};
    const auto y = apply_attributes(full, table);
    for (std::size_t c = 0; c < 6; ++c) CHECK(y.at(0, c) == table.row(full.nodes[0].embedding_index)[c]);
  }

  TEST_CASE("fallback embeddings are unit vectors determined by name and seed") {
    const auto a = fallback_embedding("library", 16, 4);
    CHECK(a == fallback_embedding("library", 16, 4));
    CHECK(a != fallback_embedding("library", 16, 5));
    CHECK(a != fallback_embedding("dorm", 16, 4));
    CHECK(std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("isolated node: new state is W_x x") {
    GnnConfig c = small_config();
    c.layers = 1;
    c.nonlinear = false;
    Harness h(c);
    LocalContextGraph g{0, {{StreamType::kActivity, "walking", 6.0, vocab().global_index(StreamType::kActivity, "walking")}}, {}};
    const auto in = prepare_graph(g, h.table, c);
    Tape tape(false);
    const auto out = h.run(tape, in);
    const Vec x = [&] {
      Vec v;
      for (double e : h.table.row(g.nodes[0].embedding_index)) v.push_back(e * 0.25);
      return v;
    }();
    check_close(tape.value(out.states).data(), mul(as_mat(h.params.value(h.ids.layers[0].self[0])), x), 1e-14);
    CHECK(tape.value(out.node_attention)[0] == 1.0);
    check_close(tape.value(out.semantic).data(), tape.value(out.states).values(), 0.0);
    for (double v : tape.value(out.structural).values()) CHECK(v == 0.0);
    CHECK_FALSE(out.edge_attention.valid());
  }

  TEST_CASE("single homogeneous edge: alpha is 1 whatever the weight") {
    GnnConfig c = small_config();
    Harness h(c);
    const auto idx = [](const char* n) { return vocab().global_index(StreamType::kLocation, n); };
    LocalContextGraph g{0, {{StreamType::kLocation, "dorm", 3, idx("dorm")}, {StreamType::kLocation, "gym", 2, idx("gym")}},
                        {{0, 1, EdgeKind::kHomogeneous, 1}}};
    const auto in1 = prepare_graph(g, h.table, c);
    g.edges[0].weight = 7;
    const auto in7 = prepare_graph(g, h.table, c);
    CHECK(in1.homo.val == std::vector<double>{1.0});
    CHECK(in7.homo.val == std::vector<double>{1.0});
    Tape t1(false), t7(false);
    CHECK(t1.value(h.run(t1, in1).rep).values() == t7.value(h.run(t7, in7).rep).values());
  }

  TEST_CASE("forward matches the dense oracle on random graphs") {
    std::mt19937_64 rng(7);
    for (bool nonlinear : {true, false})
      for (bool homo : {true, false})
        for (bool het : {true, false}) {
          GnnConfig c = small_config();
          c.nonlinear = nonlinear;
          c.homogeneous = homo;
          c.heterogeneous = het;
          Harness h(c, rng());
          for (int trial = 0; trial < 5; ++trial) {
            auto g = random_graph(rng, 4, 0.4);
            if (g.nodes.empty()) continue;
            const auto want = dense_forward(g, h.table, h.params, c);
            const auto in = prepare_graph(g, h.table, c);
            Tape tape(false);
            const auto out = h.run(tape, in);
            // Internal rows equal graph order because nodes are canonical.
            for (std::size_t r = 0; r < in.node_count; ++r) CHECK(in.graph_node[r] == r);
            for (std::size_t i = 0; i < want.states.size(); ++i)
              check_close(tape.value(out.states).row(i), want.states[i], 1e-12);
            check_close(tape.value(out.semantic).data(), want.semantic, 1e-12);
            check_close(tape.value(out.structural).data(), want.structural, 1e-12);
            check_close(tape.value(out.rep).data(), want.rep, 1e-12);
            check_close(tape.value(out.node_attention).data(), want.node_attention, 1e-12);
            if (!want.edge_attention.empty())
              check_close(tape.value(out.edge_attention).data(), want.edge_attention, 1e-12);
          }
        }
  }

  TEST_CASE("zero layers pools the attribute-scaled embeddings") {
    GnnConfig c = small_config();
    c.layers = 0;
    Harness h(c);
    std::mt19937_64 rng(3);
    const auto g = random_graph(rng, 3, 0.5);
    const auto in = prepare_graph(g, h.table, c);
    Tape tape(false);
    const auto out = h.run(tape, in);
    CHECK(tape.value(out.states).values() == in.x0.values());
    check_close(tape.value(out.rep).data(), dense_forward(g, h.table, h.params, c).rep, 1e-12);
  }

  TEST_CASE("empty graph yields the learned empty-day vector") {
    GnnConfig c = small_config();
    Harness h(c);
    h.params.value(h.ids.empty_day).fill(0.5);
    const auto in = prepare_graph(LocalContextGraph{}, h.table, c);
    Tape tape(false);
    const auto out = h.run(tape, in);
    CHECK(out.empty);
    CHECK(tape.value(out.rep).values() == Vec(c.rep_dim, 0.5));
  }

  TEST_CASE("edge embeddings: projection picks the source half, zero states give zero") {
    GnnConfig c = small_config();
    Harness h(c);
    std::mt19937_64 rng(4);
    auto g = random_graph(rng, 3, 0.6);
    while (g.edges.empty()) g = random_graph(rng, 3, 0.6);
    const auto in = prepare_graph(g, h.table, c);
    Tape tape(false);
    Tensor pick({c.node_dim, 2 * c.node_dim});
    for (std::size_t i = 0; i < c.node_dim; ++i) pick.at(i, i) = 1.0;
    Var x = tape.constant(in.x0);
    const auto& e = tape.value(edge_embeddings(tape, x, in, tape.constant(pick)));
    for (std::size_t k = 0; k < in.edge_src.size(); ++k)
      for (std::size_t col = 0; col < c.node_dim; ++col) CHECK(e.at(k, col) == in.x0.at(in.edge_src[k], col));

    Var zero = tape.constant(Tensor({in.node_count, c.node_dim}));
    const auto& z = tape.value(edge_embeddings(tape, zero, in, tape.parameter(h.params, h.ids.edge_proj)));
    for (double v : z.values()) CHECK(v == 0.0);

    // A random projection is not symmetric in (i, j).
    const auto& r = tape.value(edge_embeddings(tape, x, in, tape.parameter(h.params, h.ids.edge_proj)));
    bool asymmetric = false;
    for (std::size_t a = 0; a < in.edge_src.size(); ++a)
      for (std::size_t b = 0; b < in.edge_src.size(); ++b)
        if (in.edge_src[a] == in.edge_dst[b] && in.edge_dst[a] == in.edge_src[b])
          for (std::size_t col = 0; col < c.edge_dim; ++col) asymmetric |= std::fabs(r.at(a, col) - r.at(b, col)) > 1e-9;
    if (g.edges.size() > 1) CHECK(asymmetric);
  }

  TEST_CASE("pooling: identical states and identical edges") {
    Tape tape(false);
    Tensor states({4, 3});
    for (std::size_t r = 0; r < 4; ++r) states.at(r, 0) = 0.3, states.at(r, 1) = -0.2, states.at(r, 2) = 0.9;
    const auto sem = semantic_pool(tape, tape.constant(states), tape.constant(Tensor::matrix(1, 3, {1, 2, 3})));
    for (double b : tape.value(sem.attention).values()) CHECK(b == doctest::Approx(0.25).epsilon(1e-15));
    check_close(tape.value(sem.pooled).data(), {0.3, -0.2, 0.9}, 1e-15);

    Tensor edges({3, 2});
    for (std::size_t r = 0; r < 3; ++r) edges.at(r, 0) = 1.5, edges.at(r, 1) = -0.5;
    const auto st = structural_pool(tape, tape.constant(edges), sem.pooled,
                                    tape.constant(Tensor::matrix(2, 3, {1, 0, 0, 0, 1, 0})));
    check_close(tape.value(st.pooled).data(), {1.5, -0.5}, 1e-15);
    const auto one = structural_pool(tape, tape.constant(Tensor::matrix(1, 2, {0.7, 0.1})), sem.pooled,
                                     tape.constant(Tensor::matrix(2, 3, {1, 0, 0, 0, 1, 0})));
    check_close(tape.value(one.pooled).data(), {0.7, 0.1}, 0.0);
  }

  TEST_CASE("attention distributions sum to one and g_e stays in the hull") {
    GnnConfig c = small_config();
    Harness h(c);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = random_graph(rng, 5, 0.5);
      if (g.nodes.empty()) continue;
      const auto in = prepare_graph(g, h.table, c);
      Tape tape(false);
      const auto out = h.run(tape, in);
      const auto& b = tape.value(out.node_attention).values();
      CHECK(std::fabs(std::accumulate(b.begin(), b.end(), 0.0) - 1.0) <= 1e-12);
      if (!out.edge_attention.valid()) continue;
      const auto& be = tape.value(out.edge_attention).values();
      CHECK(std::fabs(std::accumulate(be.begin(), be.end(), 0.0) - 1.0) <= 1e-12);
      for (double v : be) CHECK(v >= 0.0);
      // each coordinate of g_e lies between the min and max over edges
      Tape t2(false);
      const auto& e = t2.value(edge_embeddings(t2, t2.constant(tape.value(out.states)), in,
                                              t2.parameter(h.params, h.ids.edge_proj)));
      const auto& ge = tape.value(out.structural);
      for (std::size_t col = 0; col < c.edge_dim; ++col) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t k = 0; k < e.rows(); ++k) lo = std::min(lo, e.at(k, col)), hi = std::max(hi, e.at(k, col));
        CHECK(ge[col] >= lo - 1e-12);
        CHECK(ge[col] <= hi + 1e-12);
      }
    }
  }

  TEST_CASE("node permutation leaves g_s and g_e unchanged") {
    GnnConfig c = small_config();
    Harness h(c);
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = random_graph(rng, 5, 0.5);
      if (g.nodes.size() < 2) continue;
      std::vector<std::size_t> perm(g.nodes.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      LocalContextGraph p{g.day_index, {}, {}};
      std::vector<std::size_t> where(perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i) {
        p.nodes.push_back(g.nodes[perm[i]]);
        where[perm[i]] = i;
      }
      for (auto e : g.edges) {
        e.src = where[e.src];
        e.dst = where[e.dst];
        p.edges.push_back(e);
      }
      std::shuffle(p.edges.begin(), p.edges.end(), rng);
      Tape ta(false), tb(false);
      const auto a = h.run(ta, prepare_graph(g, h.table, c));
      const auto b = h.run(tb, prepare_graph(p, h.table, c));
      check_close(tb.value(b.semantic).data(), ta.value(a.semantic).values(), 1e-12);
      check_close(tb.value(b.structural).data(), ta.value(a.structural).values(), 1e-12);
    }
  }

  TEST_CASE("scaling every edge weight leaves the forward pass unchanged") {
    GnnConfig c = small_config();
    Harness h(c);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      auto g = random_graph(rng, 5, 0.5);
      if (g.nodes.empty()) continue;
      Tape ta(false);
      const auto a = h.run(ta, prepare_graph(g, h.table, c));
      for (auto& e : g.edges) e.weight *= 7;
      Tape tb(false);
      const auto b = h.run(tb, prepare_graph(g, h.table, c));
      check_close(tb.value(b.rep).data(), ta.value(a.rep).values(), 1e-12);
    }
  }

  TEST_CASE("embedding dimension must match the node dimension") {
    GnnConfig c = small_config();
    const auto table = EmbeddingTable::fallback(vocab(), c.node_dim + 1, 0);
    CHECK_THROWS_AS(prepare_graph(LocalContextGraph{}, table, c), Error);
  }

  TEST_CASE("gradient of the loss matches finite differences for every parameter group") {
    const auto report = model_gradient_check(3);
    for (const auto& e : report.entries) {
      INFO(e.name);
      CHECK(e.max_rel_error < 1e-4);
    }
    CHECK(report.entries.size() >= 20);
  }
}
