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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lgbg/param_set.hpp"

namespace lgbg {

struct GradCheckEntry {
  std::string name;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
};

struct GradCheckOptions {
  double eps = 1e-6;
  // Coordinates probed per parameter; 0 probes every coordinate.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 0;
};

// Compares `analytic` against central differences of `loss`, one parameter
// coordinate at a time. The error per coordinate is
// |analytic - numeric| / max(1, |numeric|). `params` is perturbed in place and
// restored before returning.
GradCheckReport finite_diff_check(const std::function<double(const ParamSet&)>& loss,
                                  ParamSet& params, const Gradients& analytic,
                                  const GradCheckOptions& options = {});

}  // namespace lgbg
