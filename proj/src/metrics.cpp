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

#include "lgbg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lgbg/error.hpp"

namespace lgbg {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t times) {
  if (truth >= classes_ || predicted >= classes_) fail(ErrorKind::kRange, "confusion matrix: class out of range");
  counts_[truth * classes_ + predicted] += times;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < classes_; ++p) s += count(truth, p);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < classes_; ++t) s += count(t, predicted);
  return s;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) fail(ErrorKind::kDimension, "confusion matrices differ in class count");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

EvalReport report_from_confusion(const ConfusionMatrix& cm) {
  EvalReport r;
  r.confusion = cm;
  const std::size_t total = cm.total();
  if (total == 0) return r;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const std::size_t tp = cm.count(c, c);
    const std::size_t support = cm.row_sum(c);
    const std::size_t predicted = cm.col_sum(c);
    correct += tp;
    if (support == 0) continue;  // zero weight
    const double precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    const double recall = static_cast<double>(tp) / static_cast<double>(support);
    const double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double w = static_cast<double>(support) / static_cast<double>(total);
    r.precision += w * precision;
    r.recall += w * recall;
    r.f1 += w * f1;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return r;
}

EvalReport evaluate_predictions(std::span<const int> truth, std::span<const int> predicted,
                                std::size_t classes) {
  if (truth.size() != predicted.size()) fail(ErrorKind::kDimension, "evaluate: length mismatch");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i)
    cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  return report_from_confusion(cm);
}

EvalReport average_reports(std::span<const EvalReport> reports) {
  EvalReport mean;
  if (reports.empty()) return mean;
  mean.confusion = ConfusionMatrix(reports.front().confusion.classes());
  for (const auto& r : reports) {
    mean.accuracy += r.accuracy;
    mean.precision += r.precision;
    mean.recall += r.recall;
    mean.f1 += r.f1;
    mean.confusion += r.confusion;
  }
  const double n = static_cast<double>(reports.size());
  mean.accuracy /= n;
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

namespace {

std::string csv_row(const std::string& label, const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%zu\n", r.accuracy, r.precision, r.recall, r.f1,
                r.confusion.total());
  return label + buf;
}

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  std::vector<std::vector<std::size_t>> cm(r.confusion.classes());
  for (std::size_t t = 0; t < r.confusion.classes(); ++t)
    for (std::size_t p = 0; p < r.confusion.classes(); ++p) cm[t].push_back(r.confusion.count(t, p));
  j["confusion"] = cm;
  return j;
}

}  // namespace

std::string reports_to_csv(std::span<const EvalReport> tasks, const EvalReport& mean) {
  std::string out = "task,accuracy,precision,recall,f1,samples\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) out += csv_row(std::to_string(i), tasks[i]);
  out += csv_row("mean", mean);
  return out;
}

nlohmann::json reports_to_json(std::span<const EvalReport> tasks, const EvalReport& mean) {
  nlohmann::json j;
  j["tasks"] = nlohmann::json::array();
  for (const auto& t : tasks) j["tasks"].push_back(report_json(t));
  j["mean"] = report_json(mean);
  return j;
}

RegressionReport regression_report(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty())
    fail(ErrorKind::kDimension, "regression_report: need equal, non-empty inputs");
  const double n = static_cast<double>(truth.size());
  double mt = 0.0, mp = 0.0, abs_err = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    mt += truth[i];
    mp += predicted[i];
    abs_err += std::abs(truth[i] - predicted[i]);
  }
  mt /= n;
  mp /= n;
  double ss_res = 0.0, ss_tot = 0.0, cov = 0.0, vp = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
    ss_tot += (truth[i] - mt) * (truth[i] - mt);
    cov += (truth[i] - mt) * (predicted[i] - mp);
    vp += (predicted[i] - mp) * (predicted[i] - mp);
  }
  RegressionReport r;
  r.mae = abs_err / n;
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  if (ss_tot > 0.0 && vp > 0.0) {
    r.pearson = std::clamp(cov / std::sqrt(ss_tot * vp), -1.0, 1.0);
  } else {
    r.pearson = 0.0;
    r.pearson_defined = false;
  }
  return r;
}

}  // namespace lgbg
