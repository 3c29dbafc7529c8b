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

#include "lgbg/grade.hpp"

#include <string>

#include "lgbg/error.hpp"
#include "lgbg/knn.hpp"

namespace lgbg {

namespace {

std::vector<double> loo_predictions(const FeatureRows& rows, const std::vector<double>& targets, std::size_t k) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    FeatureRows train;
    std::vector<double> y;
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (j != i) {
        train.push_back(rows[j]);
        y.push_back(targets[j]);
      }
    const auto scaler = Standardizer::fit(train);
    out[i] = knn_regress(scaler.apply(train), y, scaler.apply(rows[i]), std::min(k, train.size()));
  }
  return out;
}

}  // namespace

GradeReport grade_regression(const Model& model, const PreparedDataset& data,
                             const std::vector<std::optional<double>>& gpa, std::size_t k) {
  if (gpa.size() != data.subject_ids.size())
    fail(ErrorKind::kUsage, "grade_regression: gpa list does not match the subject list");
  if (k == 0) fail(ErrorKind::kValidation, "grade_regression: k must be positive");
  GradeReport report;
  FeatureRows graph_rows, baseline_rows;
  for (std::size_t s = 0; s < gpa.size(); ++s) {
    if (!gpa[s]) continue;
    const auto windows = data.subject_windows(s);
    if (windows.empty()) continue;
    std::vector<double> mean;
    for (const auto& w : windows) {
      const auto g = model.global_representation(w);
      if (mean.empty()) mean.assign(g.size(), 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) mean[i] += g[i];
    }
    for (auto& v : mean) v /= static_cast<double>(windows.size());
    std::vector<double> summed(kBehaviorFeatureSize, 0.0);
    for (auto g : data.subject_days[s])
      for (std::size_t i = 0; i < kBehaviorFeatureSize; ++i) summed[i] += data.features[g][i];
    graph_rows.push_back(std::move(mean));
    baseline_rows.push_back(std::move(summed));
    report.subjects.push_back(s);
    report.truth.push_back(*gpa[s]);
  }
  if (report.subjects.size() < 2)
    fail(ErrorKind::kInsufficientData, "grade regression needs at least 2 subjects with a GPA and a full window, got " +
                                           std::to_string(report.subjects.size()));
  report.graph_predictions = loo_predictions(graph_rows, report.truth, k);
  report.baseline_predictions = loo_predictions(baseline_rows, report.truth, k);
  report.graph = regression_report(report.truth, report.graph_predictions);
  report.baseline = regression_report(report.truth, report.baseline_predictions);
  return report;
}

}  // namespace lgbg
