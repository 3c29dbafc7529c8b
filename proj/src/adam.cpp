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

#include "lgbg/adam.hpp"

#include <cmath>

#include "lgbg/error.hpp"

namespace lgbg {

Adam::Adam(const ParamSet& params, AdamOptions options) : options_(options) {
  for (ParamId i = 0; i < params.size(); ++i) {
    m_.emplace_back(params.value(i).shape(), 0.0);
    v_.emplace_back(params.value(i).shape(), 0.0);
  }
}

void Adam::step(ParamSet& params, const Gradients& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    fail(ErrorKind::kDimension, "adam: parameter/gradient count mismatch");
  for (ParamId i = 0; i < params.size(); ++i)
    if (params.value(i).shape() != m_[i].shape() || grads[i].shape() != m_[i].shape())
      fail(ErrorKind::kDimension, "adam: shape mismatch for " + params.name(i));

  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(options_.beta1, t);
  const double c2 = 1.0 - std::pow(options_.beta2, t);
  for (ParamId i = 0; i < params.size(); ++i) {
    auto p = params.value(i).data();
    auto g = grads[i].data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * g[k];
      v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p[k] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
    params.value(i).require_finite("adam step");
  }
}

}  // namespace lgbg
