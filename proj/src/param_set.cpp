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

#include "lgbg/param_set.hpp"

#include <cmath>

#include "lgbg/error.hpp"

namespace lgbg {

ParamId ParamSet::add(std::string name, Tensor value) {
  if (index_.count(name)) fail(ErrorKind::kUsage, "duplicate parameter name: " + name);
  const ParamId id = values_.size();
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return id;
}

ParamId ParamSet::id(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorKind::kUsage, "unknown parameter: " + name);
  return it->second;
}

std::size_t ParamSet::total_size() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

Gradients::Gradients(const ParamSet& params) {
  grads_.reserve(params.size());
  for (ParamId i = 0; i < params.size(); ++i)
    grads_.emplace_back(params.value(i).shape(), 0.0);
}

void Gradients::accumulate(const Gradients& other) {
  if (other.size() != size()) fail(ErrorKind::kDimension, "gradient sets differ in size");
  for (std::size_t p = 0; p < grads_.size(); ++p) {
    auto dst = grads_[p].data();
    auto src = other.grads_[p].data();
    if (dst.size() != src.size()) fail(ErrorKind::kDimension, "gradient shape mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

void Gradients::scale(double factor) {
  for (auto& g : grads_)
    for (auto& v : g.data()) v *= factor;
}

void Gradients::zero() {
  for (auto& g : grads_) g.fill(0.0);
}

Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-a, a);
  Tensor t({rows, cols});
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

}  // namespace lgbg
