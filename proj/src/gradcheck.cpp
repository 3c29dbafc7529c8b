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

#include "lgbg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lgbg/error.hpp"

namespace lgbg {

GradCheckReport finite_diff_check(const std::function<double(const ParamSet&)>& loss,
                                  ParamSet& params, const Gradients& analytic,
                                  const GradCheckOptions& options) {
  if (!(options.eps >= 1e-7 && options.eps <= 1e-3))
    fail(ErrorKind::kUsage, "finite_diff_check: eps must lie in [1e-7, 1e-3]");
  if (analytic.size() != params.size())
    fail(ErrorKind::kDimension, "finite_diff_check: gradient set does not match parameters");

  auto evaluate = [&]() {
    const double v = loss(params);
    if (!std::isfinite(v)) fail(ErrorKind::kNumeric, "finite_diff_check: loss is not finite");
    return v;
  };

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  for (ParamId p = 0; p < params.size(); ++p) {
    Tensor& value = params.value(p);
    std::vector<std::size_t> coords(value.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_param && coords.size() > options.max_coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_param);
    }
    GradCheckEntry entry{params.name(p), coords.size(), 0.0};
    for (std::size_t c : coords) {
      const double saved = value[c];
      value[c] = saved + options.eps;
      const double up = evaluate();
      value[c] = saved - options.eps;
      const double down = evaluate();
      value[c] = saved;
      const double numeric = (up - down) / (2.0 * options.eps);
      const double err = std::abs(analytic[p][c] - numeric) / std::max(1.0, std::abs(numeric));
      entry.max_rel_error = std::max(entry.max_rel_error, err);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace lgbg
