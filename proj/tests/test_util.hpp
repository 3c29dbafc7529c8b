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

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lgbg/autodiff.hpp"
#include "lgbg/gradcheck.hpp"
#include "lgbg/param_set.hpp"

namespace lgbg::test {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = u(rng);
  return t;
}

using OpBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

// Reduces any output to a scalar through a fixed random projection, so that
// every output coordinate contributes to the checked gradient.
inline Var project_to_scalar(Tape& tape, Var out, std::uint64_t seed) {
  const std::size_t n = tape.value(out).size();
  std::mt19937_64 rng(seed);
  Var flat = tape.reshape(out, {n});
  Var w = tape.constant(random_tensor({1, n}, rng));
  return tape.sum(tape.linear(flat, w));
}

// Max relative error between tape gradients and central differences for a
// scalar built from `params` by `build`.
inline double op_gradient_error(ParamSet params, const OpBuilder& build, double eps = 1e-6,
                                std::uint64_t seed = 11) {
  const auto run = [&](const ParamSet& p, Tape& tape) {
    std::vector<Var> vars;
    for (std::size_t i = 0; i < p.size(); ++i) vars.push_back(tape.parameter(p, i));
    return project_to_scalar(tape, build(tape, vars), seed);
  };
  Tape tape(true);
  Var root = run(params, tape);
  tape.backward(root);
  const Gradients grads = tape.param_grads(params);
  const auto loss = [&](const ParamSet& p) {
    Tape t(false);
    return t.value(run(p, t))[0];
  };
  GradCheckOptions options;
  options.eps = eps;
  return finite_diff_check(loss, params, grads, options).max_rel_error;
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace lgbg::test
