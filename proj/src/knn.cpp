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

#include "lgbg/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lgbg/error.hpp"

namespace lgbg {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kDimension, "knn: feature length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// (distance, index) of the k nearest rows, nearest first; index breaks ties.
std::vector<std::pair<double, std::size_t>> nearest(const FeatureRows& train, std::span<const double> query,
                                                    std::size_t k) {
  if (train.empty()) fail(ErrorKind::kInsufficientData, "knn: empty training set");
  if (k == 0) fail(ErrorKind::kUsage, "knn: k must be positive");
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) d.emplace_back(distance(train[i], query), i);
  const std::size_t kk = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
  d.resize(kk);
  return d;
}

}  // namespace

Standardizer Standardizer::fit(const FeatureRows& rows) {
  if (rows.empty()) fail(ErrorKind::kInsufficientData, "standardizer: no rows");
  const std::size_t d = rows.front().size();
  Standardizer s;
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < d; ++c) s.mean_[c] += r[c];
  for (auto& m : s.mean_) m /= static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t c = 0; c < d; ++c) s.scale_[c] += (r[c] - s.mean_[c]) * (r[c] - s.mean_[c]);
  for (auto& v : s.scale_) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (v < 1e-12) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean_.size()) fail(ErrorKind::kDimension, "standardizer: feature length mismatch");
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean_[c]) / scale_[c];
  return out;
}

FeatureRows Standardizer::apply(const FeatureRows& rows) const {
  FeatureRows out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply(r));
  return out;
}

int knn_classify(const FeatureRows& train, std::span<const int> labels, std::span<const double> query,
                 std::size_t k) {
  if (labels.size() != train.size()) fail(ErrorKind::kDimension, "knn: label count mismatch");
  const auto nn = nearest(train, query, k);
  std::map<int, std::pair<std::size_t, std::size_t>> votes;  // class -> (count, rank of first member)
  for (std::size_t r = 0; r < nn.size(); ++r) {
    auto [it, inserted] = votes.try_emplace(labels[nn[r].second], 0, r);
    ++it->second.first;
  }
  int best = votes.begin()->first;
  for (const auto& [cls, v] : votes) {
    const auto& b = votes.at(best);
    if (v.first > b.first || (v.first == b.first && v.second < b.second)) best = cls;
  }
  return best;
}

double knn_regress(const FeatureRows& train, std::span<const double> targets, std::span<const double> query,
                   std::size_t k) {
  if (targets.size() != train.size()) fail(ErrorKind::kDimension, "knn: target count mismatch");
  const auto nn = nearest(train, query, k);
  double exact_sum = 0.0;
  std::size_t exact = 0;
  for (const auto& [d, i] : nn)
    if (d == 0.0) {
      exact_sum += targets[i];
      ++exact;
    }
  if (exact) return exact_sum / static_cast<double>(exact);
  double num = 0.0, den = 0.0;
  for (const auto& [d, i] : nn) {
    num += targets[i] / d;
    den += 1.0 / d;
  }
  return num / den;
}

}  // namespace lgbg
