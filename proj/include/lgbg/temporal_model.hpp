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
#include <random>
#include <span>
#include <vector>

#include "lgbg/autodiff.hpp"
#include "lgbg/param_set.hpp"

namespace lgbg {

inline constexpr std::size_t kClassCount = 4;

struct TemporalConfig {
  std::size_t rep_dim = 64;       // d_p
  std::size_t attn_dim = 64;      // d_a
  std::size_t max_positions = 16;  // length of the position table
};

struct TemporalParamIds {
  ParamId query = 0;   // W_q [d_a x d_p]
  ParamId key = 0;     // W_p [d_a x d_p]
  ParamId value = 0;   // W_g [d_p x d_p]
  ParamId head_weight = 0;  // [4 x d_p]
  ParamId head_bias = 0;    // [4]
};

TemporalParamIds register_temporal_params(ParamSet& params, const TemporalConfig& config,
                                          std::mt19937_64& rng);
TemporalParamIds lookup_temporal_params(const ParamSet& params);

// Sinusoidal position code: entry 2j is sin(i / 10000^(2j/d)), entry 2j+1 the
// matching cos. Throws kRange when i >= max_positions.
std::vector<double> position_embedding(std::size_t i, std::size_t dim, std::size_t max_positions);

struct GlobalRep {
  Var g_star;  // [d_p]
  Var gamma;   // [T x T], rows sum to one
};

// f(g_i, g_j) = (W_q (g_i + p_i)) . (W_p (g_j + p_j)), gamma = row softmax of
// f / sqrt(d_p), g*_ = sum_i sum_j gamma_ij W_g g_j.
GlobalRep global_self_attention(Tape& tape, const ParamSet& params, const TemporalParamIds& ids,
                                std::span<const Var> reps, const TemporalConfig& config);

// Softmax class probabilities from a fully connected head.
Var classify(Tape& tape, const ParamSet& params, const TemporalParamIds& ids, Var g_star);

}  // namespace lgbg
