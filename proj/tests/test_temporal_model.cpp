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
#include <random>

#include "doctest.h"
#include "lgbg/error.hpp"
#include "lgbg/temporal_model.hpp"
#include "test_util.hpp"

using namespace lgbg;

namespace {

struct Fixture {
  TemporalConfig cfg;
  ParamSet params;
  TemporalParamIds ids;

  explicit Fixture(TemporalConfig c, std::uint64_t seed = 1) : cfg(c) {
    std::mt19937_64 rng(seed);
    ids = register_temporal_params(params, cfg, rng);
  }
};

std::vector<Var> constant_reps(Tape& tape, const std::vector<std::vector<double>>& reps) {
  std::vector<Var> out;
  for (const auto& r : reps) out.push_back(tape.constant(Tensor::vector(r)));
  return out;
}

double w(const Tensor& t, std::size_t r, std::size_t c) { return t.at(r, c); }

}  // namespace

TEST_SUITE("temporal_model") {
  TEST_CASE("position embedding at 0 alternates 0 and 1") {
    const auto p = position_embedding(0, 4, 16);
    CHECK(p == std::vector<double>{0.0, 1.0, 0.0, 1.0});
  }

  TEST_CASE("position embedding follows the sinusoidal formula") {
    const std::size_t d = 8;
    const auto p = position_embedding(3, d, 16);
    for (std::size_t j = 0; j < d / 2; ++j) {
      const double angle = 3.0 / std::pow(10000.0, 2.0 * j / d);
      CHECK(p[2 * j] == doctest::Approx(std::sin(angle)).epsilon(1e-14));
      CHECK(p[2 * j + 1] == doctest::Approx(std::cos(angle)).epsilon(1e-14));
    }
  }

  TEST_CASE("position beyond the table is a range error") {
    try {
      position_embedding(16, 4, 16);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kRange);
    }
  }

  TEST_CASE("single day: gamma is [[1]] and g* is W_g g") {
    Fixture f({5, 3, 4});
    Tape tape(false);
    const std::vector<double> g{0.1, -0.4, 0.7, 0.2, 0.0};
    const auto reps = constant_reps(tape, {g});
    const auto out = global_self_attention(tape, f.params, f.ids, reps, f.cfg);
    CHECK(tape.value(out.gamma).values() == std::vector<double>{1.0});
    const auto& wg = f.params.value(f.ids.value);
    for (std::size_t r = 0; r < 5; ++r) {
      double want = 0;
      for (std::size_t c = 0; c < 5; ++c) want += w(wg, r, c) * g[c];
      CHECK(tape.value(out.g_star)[r] == doctest::Approx(want).epsilon(1e-14));
    }
  }

  TEST_CASE("zero query projection gives uniform gamma and g* = sum_j W_g g_j") {
    Fixture f({4, 3, 8});
    f.params.value(f.ids.query).fill(0.0);
    std::mt19937_64 rng(3);
    std::vector<std::vector<double>> g(5, std::vector<double>(4));
    std::normal_distribution<double> n(0, 1);
    for (auto& r : g)
      for (auto& v : r) v = n(rng);
    Tape tape(false);
    const auto out = global_self_attention(tape, f.params, f.ids, constant_reps(tape, g), f.cfg);
    for (double v : tape.value(out.gamma).values()) CHECK(v == doctest::Approx(0.2).epsilon(1e-14));
    const auto& wg = f.params.value(f.ids.value);
    for (std::size_t r = 0; r < 4; ++r) {
      double want = 0;
      for (const auto& gj : g)
        for (std::size_t c = 0; c < 4; ++c) want += w(wg, r, c) * gj[c];
      CHECK(tape.value(out.g_star)[r] == doctest::Approx(want).epsilon(1e-12));
    }
  }

  TEST_CASE("attention matches a dense evaluation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      std::mt19937_64 rng(seed);
      const std::size_t T = 1 + rng() % 7, dp = 2 + rng() % 6, da = 1 + rng() % 5;
      Fixture f({dp, da, 8}, seed);
      std::normal_distribution<double> n(0, 1);
      std::vector<std::vector<double>> g(T, std::vector<double>(dp));
      for (auto& r : g)
        for (auto& v : r) v = n(rng);
      Tape tape(false);
      const auto out = global_self_attention(tape, f.params, f.ids, constant_reps(tape, g), f.cfg);

      const auto& wq = f.params.value(f.ids.query);
      const auto& wp = f.params.value(f.ids.key);
      const auto& wg = f.params.value(f.ids.value);
      std::vector<std::vector<double>> q(T, std::vector<double>(da)), k(T, std::vector<double>(da));
      for (std::size_t i = 0; i < T; ++i) {
        const auto p = position_embedding(i, dp, 8);
        for (std::size_t a = 0; a < da; ++a)
          for (std::size_t c = 0; c < dp; ++c) {
            q[i][a] += w(wq, a, c) * (g[i][c] + p[c]);
            k[i][a] += w(wp, a, c) * (g[i][c] + p[c]);
          }
      }
      std::vector<double> gstar(dp, 0.0);
      for (std::size_t i = 0; i < T; ++i) {
        std::vector<double> f_ij(T);
        double m = -1e300, s = 0;
        for (std::size_t j = 0; j < T; ++j) {
          for (std::size_t a = 0; a < da; ++a) f_ij[j] += q[i][a] * k[j][a];
          f_ij[j] /= std::sqrt(static_cast<double>(dp));
          m = std::max(m, f_ij[j]);
        }
        for (auto& v : f_ij) s += v = std::exp(v - m);
        for (std::size_t j = 0; j < T; ++j) {
          const double gamma = f_ij[j] / s;
          CHECK(tape.value(out.gamma).at(i, j) == doctest::Approx(gamma).epsilon(1e-12));
          for (std::size_t r = 0; r < dp; ++r)
            for (std::size_t c = 0; c < dp; ++c) gstar[r] += gamma * w(wg, r, c) * g[j][c];
        }
      }
      for (std::size_t r = 0; r < dp; ++r) CHECK(tape.value(out.g_star)[r] == doctest::Approx(gstar[r]).epsilon(1e-12));
    }
  }

  TEST_CASE("gamma rows sum to one") {
    Fixture f({6, 4, 16});
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0, 3);
    for (std::size_t T = 1; T <= 16; ++T) {
      std::vector<std::vector<double>> g(T, std::vector<double>(6));
      for (auto& r : g)
        for (auto& v : r) v = n(rng);
      Tape tape(false);
      const auto& gamma = tape.value(global_self_attention(tape, f.params, f.ids, constant_reps(tape, g), f.cfg).gamma);
      for (std::size_t i = 0; i < T; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < T; ++j) s += gamma.at(i, j);
        CHECK(std::fabs(s - 1.0) <= 1e-12);
      }
    }
  }

  TEST_CASE("no representations or too many positions are rejected") {
    Fixture f({4, 4, 2});
    Tape tape(false);
    CHECK_THROWS_AS(global_self_attention(tape, f.params, f.ids, {}, f.cfg), Error);
    const auto reps = constant_reps(tape, {{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK_THROWS_AS(global_self_attention(tape, f.params, f.ids, reps, f.cfg), Error);
  }

  TEST_CASE("zero head gives uniform class probabilities") {
    Fixture f({4, 4, 4});
    f.params.value(f.ids.head_weight).fill(0.0);
    Tape tape(false);
    const auto& p = tape.value(classify(tape, f.params, f.ids, tape.constant(Tensor::vector({1, -2, 3, 0.5}))));
    for (double v : p.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("large logits saturate without overflow and the argmax follows the bias") {
    Fixture f({4, 4, 4});
    f.params.value(f.ids.head_weight).fill(0.0);
    f.params.value(f.ids.head_bias) = Tensor::vector({0, 1000, 0, 0});
    Tape tape(false);
    const auto& p = tape.value(classify(tape, f.params, f.ids, tape.constant(Tensor::vector({1, 1, 1, 1}))));
    CHECK(p.all_finite());
    CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[0] < 1e-300);
  }

  TEST_CASE("attention and head gradients match finite differences") {
    Fixture f({5, 3, 8});
    std::mt19937_64 rng(4);
    std::vector<Tensor> reps;
    for (int t = 0; t < 4; ++t) reps.push_back(test::random_tensor({5}, rng));
    const auto run = [&](Tape& tape, const ParamSet& params) {
      std::vector<Var> v;
      for (const auto& r : reps) v.push_back(tape.constant(r));
      const auto out = global_self_attention(tape, params, f.ids, v, f.cfg);
      return tape.nll(classify(tape, params, f.ids, out.g_star), 2);
    };
    Tape tape(true);
    tape.backward(run(tape, f.params));
    const Gradients grads = tape.param_grads(f.params);
    const auto loss = [&](const ParamSet& p) {
      Tape t(false);
      return t.value(run(t, p))[0];
    };
    const auto report = finite_diff_check(loss, f.params, grads);
    CHECK(report.entries.size() == 5);
    CHECK(report.max_rel_error < 1e-6);
  }
}
