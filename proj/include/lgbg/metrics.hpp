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
#include <string>
#include <vector>

#include "json.hpp"

namespace lgbg {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 4) : classes_(classes), counts_(classes * classes, 0) {}

  void add(std::size_t truth, std::size_t predicted, std::size_t times = 1);
  std::size_t count(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
  std::size_t row_sum(std::size_t truth) const;
  std::size_t col_sum(std::size_t predicted) const;
  std::size_t total() const;
  std::size_t classes() const noexcept { return classes_; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

 private:
  std::size_t classes_;
  std::vector<std::size_t> counts_;
};

// Accuracy plus precision/recall/F1 computed per class and weighted by the
// number of true samples of each class.
struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
};

EvalReport report_from_confusion(const ConfusionMatrix& cm);
EvalReport evaluate_predictions(std::span<const int> truth, std::span<const int> predicted,
                                std::size_t classes = 4);
// Mean of each metric across tasks; confusion matrices are summed.
EvalReport average_reports(std::span<const EvalReport> reports);

std::string reports_to_csv(std::span<const EvalReport> tasks, const EvalReport& mean);
nlohmann::json reports_to_json(std::span<const EvalReport> tasks, const EvalReport& mean);

struct RegressionReport {
  double mae = 0.0;
  double r2 = 0.0;
  double pearson = 0.0;
  bool pearson_defined = true;  // false when either side has zero variance
};

RegressionReport regression_report(std::span<const double> truth, std::span<const double> predicted);

}  // namespace lgbg
