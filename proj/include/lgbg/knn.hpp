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
#include <vector>

namespace lgbg {

using FeatureRows = std::vector<std::vector<double>>;

// Per-column z-scoring fitted on a reference set. Constant columns keep unit
// scale so they contribute nothing after centering.
class Standardizer {
 public:
  static Standardizer fit(const FeatureRows& rows);
  std::vector<double> apply(std::span<const double> row) const;
  FeatureRows apply(const FeatureRows& rows) const;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

// Majority vote among the k nearest rows (Euclidean). Ties go to the tied
// class whose nearest member is closest.
int knn_classify(const FeatureRows& train, std::span<const int> labels, std::span<const double> query,
                 std::size_t k);

// Inverse-distance weighted mean of the k nearest targets. Exact matches
// (distance 0) are averaged on their own.
double knn_regress(const FeatureRows& train, std::span<const double> targets,
                   std::span<const double> query, std::size_t k);

}  // namespace lgbg
