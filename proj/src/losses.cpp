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

#include "lgbg/losses.hpp"

#include <algorithm>
#include <cmath>

#include "lgbg/error.hpp"

namespace lgbg {

double cross_entropy(std::span<const double> probs, std::size_t label, std::size_t* clamp_count) {
  if (label >= probs.size()) fail(ErrorKind::kRange, "cross_entropy: label out of range");
  double p = probs[label];
  if (p < kProbabilityFloor) {
    if (clamp_count) ++*clamp_count;
    p = kProbabilityFloor;
  }
  return -std::log(p);
}

double node_variance_loss(const Tensor& states) {
  if (states.empty() || states.rows() < 2) return -0.5;
  const std::size_t n = states.rows(), d = states.cols();
  double total = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += states.at(r, c);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = states.at(r, c) - mean;
      total += dev * dev;
    }
  }
  const double v = total / static_cast<double>(n * d);
  return -1.0 / (1.0 + std::exp(-v));
}

Var node_variance_loss(Tape& tape, Var states) {
  return tape.scale(tape.sigmoid(tape.mean_column_variance(states)), -1.0);
}

}  // namespace lgbg
