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

#include <cstdint>
#include <vector>

#include "lgbg/dataset.hpp"
#include "lgbg/gradcheck.hpp"
#include "lgbg/model.hpp"

namespace lgbg {

// A seeded two-sample, three-day batch with small dimensions, exercising both
// edge kinds, every stream and the temporal attention.
struct ToyBatch {
  ModelConfig config;
  RawDataset raw;
  PreparedDataset data;
  std::vector<std::size_t> batch;
};

ToyBatch make_toy_batch(std::uint64_t seed);

struct ModelCheckOptions {
  double lambda = 0.1;
  double eps = 1e-6;
  // Test hook: perturbs one analytic gradient entry before the comparison.
  bool corrupt_gradient = false;
};

// Finite-difference check of the total loss gradient (parallel batch kernel)
// with respect to every model parameter.
GradCheckReport model_gradient_check(std::uint64_t seed, const ModelCheckOptions& options = {});

}  // namespace lgbg
