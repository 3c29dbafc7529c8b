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

#include "lgbg/temporal_model.hpp"

#include <cmath>

#include "lgbg/error.hpp"

namespace lgbg {

TemporalParamIds register_temporal_params(ParamSet& params, const TemporalConfig& config,
                                          std::mt19937_64& rng) {
  const std::size_t dp = config.rep_dim, da = config.attn_dim;
  if (dp == 0 || da == 0) fail(ErrorKind::kUsage, "temporal dimensions must be positive");
  TemporalParamIds ids;
  ids.query = params.add("temporal.query", glorot_uniform(da, dp, rng));
  ids.key = params.add("temporal.key", glorot_uniform(da, dp, rng));
  ids.value = params.add("temporal.value", glorot_uniform(dp, dp, rng));
  ids.head_weight = params.add("head.weight", glorot_uniform(kClassCount, dp, rng));
  ids.head_bias = params.add("head.bias", Tensor({kClassCount}, 0.0));
  return ids;
}

TemporalParamIds lookup_temporal_params(const ParamSet& params) {
  return {params.id("temporal.query"), params.id("temporal.key"), params.id("temporal.value"),
          params.id("head.weight"), params.id("head.bias")};
}

std::vector<double> position_embedding(std::size_t i, std::size_t dim, std::size_t max_positions) {
  if (i >= max_positions)
    fail(ErrorKind::kRange, "position " + std::to_string(i) + " outside table of " +
                                std::to_string(max_positions));
  std::vector<double> p(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const double pair = static_cast<double>(c - c % 2);
    const double angle = static_cast<double>(i) / std::pow(10000.0, pair / static_cast<double>(dim));
    p[c] = (c % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return p;
}

GlobalRep global_self_attention(Tape& tape, const ParamSet& params, const TemporalParamIds& ids,
                                std::span<const Var> reps, const TemporalConfig& config) {
  const std::size_t T = reps.size();
  const std::size_t dp = config.rep_dim;
  if (T == 0) fail(ErrorKind::kDimension, "global_self_attention: no local representations");
  std::vector<Var> rows;
  rows.reserve(T);
  for (Var r : reps) {
    if (tape.value(r).size() != dp) fail(ErrorKind::kDimension, "global_self_attention: bad rep size");
    rows.push_back(tape.reshape(r, {1, dp}));
  }
  const Var g = T == 1 ? rows.front() : tape.concat_rows(rows);

  Tensor positions({T, dp});
  for (std::size_t i = 0; i < T; ++i) {
    const auto p = position_embedding(i, dp, config.max_positions);
    std::copy(p.begin(), p.end(), positions.row(i).begin());
  }
  const Var gp = tape.add(g, tape.constant(std::move(positions)));
  const Var q = tape.linear(gp, tape.parameter(params, ids.query));
  const Var k = tape.linear(gp, tape.parameter(params, ids.key));
  const Var scores = tape.scale(tape.linear(q, k), 1.0 / std::sqrt(static_cast<double>(dp)));
  const Var gamma = tape.softmax(scores);
  const Var values = tape.linear(g, tape.parameter(params, ids.value));
  const Var attended = tape.matmul(gamma, values);
  return {tape.sum_rows(attended), gamma};
}

Var classify(Tape& tape, const ParamSet& params, const TemporalParamIds& ids, Var g_star) {
  const Var logits = tape.add(tape.linear(g_star, tape.parameter(params, ids.head_weight)),
                              tape.parameter(params, ids.head_bias));
  return tape.softmax(logits);
}

}  // namespace lgbg
