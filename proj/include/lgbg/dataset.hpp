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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgbg/concept_stream.hpp"
#include "lgbg/embedding.hpp"
#include "lgbg/graph_builder.hpp"
#include "lgbg/hetero_gnn.hpp"

namespace lgbg {

struct SubjectData {
  std::string id;
  EventLog log;
  std::map<std::int64_t, int> pam;  // day index -> PAM score 1..16
  std::optional<double> gpa;

  std::map<std::int64_t, int> labels() const;  // quantized classes
};

// A data directory:
//   dataset.json   {"format": 1, "day_origin": <int>, "subjects": [ids]}
//   vocab.json     vocabulary file
//   logs/<id>.jsonl event logs
//   labels.csv     subject,day,pam
//   gpa.csv        subject,gpa (optional)
struct RawDataset {
  Vocabulary vocab = Vocabulary::with_locations({});
  std::int64_t day_origin = 0;
  std::vector<SubjectData> subjects;
};

RawDataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const RawDataset& data);

// Anchor days (with their labels) that have a full span of days before them.
std::vector<std::pair<std::int64_t, int>> anchor_days(const std::map<std::int64_t, int>& labels,
                                                      std::size_t span);

struct PreparedSample {
  std::size_t subject = 0;
  std::int64_t anchor_day = 0;
  std::vector<std::size_t> graphs;  // indices into PreparedDataset::inputs, oldest first
  int label = 0;
};

struct PreparedDataset {
  std::size_t span = 3;
  std::vector<std::string> subject_ids;
  std::vector<std::vector<std::size_t>> subject_days;  // subject -> day -> graph index
  std::vector<LocalContextGraph> graphs;
  std::vector<GraphInput> inputs;
  std::vector<BehaviorFeature> features;  // per graph, hours per concept
  std::vector<PreparedSample> samples;

  std::vector<const GraphInput*> days(const PreparedSample& s) const;
  // Every span-long window of a subject, labeled or not (anchor order).
  std::vector<std::vector<const GraphInput*>> subject_windows(std::size_t subject) const;
};

PreparedDataset prepare_dataset(const RawDataset& data, const EmbeddingTable& table,
                                const GnnConfig& config, std::size_t span);

}  // namespace lgbg
