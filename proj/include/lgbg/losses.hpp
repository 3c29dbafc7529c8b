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
#include <span>

#include "lgbg/autodiff.hpp"
#include "lgbg/tensor.hpp"

namespace lgbg {

inline constexpr double kProbabilityFloor = 1e-12;

// -log p[label], with p clamped at kProbabilityFloor.
double cross_entropy(std::span<const double> probs, std::size_t label,
                     std::size_t* clamp_count = nullptr);

// L_n = -sigmoid(mean over columns of the population column variance).
// Fewer than two rows give the degenerate value -sigmoid(0) = -0.5.
double node_variance_loss(const Tensor& states);
Var node_variance_loss(Tape& tape, Var states);

inline double total_loss(double classification, double node_variance, double lambda) {
  return classification + lambda * node_variance;
}

}  // namespace lgbg
