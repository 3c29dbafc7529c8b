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
#include <optional>
#include <vector>

#include "lgbg/dataset.hpp"
#include "lgbg/metrics.hpp"
#include "lgbg/model.hpp"

namespace lgbg {

struct GradeReport {
  RegressionReport graph;     // mean g* per subject + KNN
  RegressionReport baseline;  // summed 108-d behavior features + KNN
  std::vector<std::size_t> subjects;
  std::vector<double> truth;
  std::vector<double> graph_predictions;
  std::vector<double> baseline_predictions;
};

// Leave-one-out KNN regression of per-subject GPA. `gpa` is aligned with
// data.subject_ids; subjects without a value are skipped. Features are
// standardized on the training subjects of each fold.
GradeReport grade_regression(const Model& model, const PreparedDataset& data,
                             const std::vector<std::optional<double>>& gpa, std::size_t k = 3);

}  // namespace lgbg
