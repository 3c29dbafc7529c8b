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

#include "lgbg/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgbg/error.hpp"

namespace lgbg {

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line_no == 1) {
      if (cells != header) fail(ErrorKind::kParse, path.string() + ": unexpected header");
      continue;
    }
    if (cells.size() != header.size())
      fail(ErrorKind::kParse, path.string() + ": line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields");
    rows.push_back(std::move(cells));
  }
  return rows;
}

template <typename T>
T parse_number(const std::string& s, const std::filesystem::path& path) {
  std::istringstream is(s);
  T v{};
  if (!(is >> v) || !is.eof()) fail(ErrorKind::kParse, path.string() + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::map<std::int64_t, int> SubjectData::labels() const {
  std::map<std::int64_t, int> out;
  for (const auto& [day, score] : pam) out[day] = quantize_pam(score);
  return out;
}

RawDataset load_dataset(const std::filesystem::path& dir) {
  RawDataset data;
  const auto manifest_path = dir / "dataset.json";
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("format", 0) != 1) fail(ErrorKind::kParse, manifest_path.string() + ": expected format 1");
  data.vocab = Vocabulary::load(dir / "vocab.json");
  data.day_origin = manifest.value("day_origin", std::int64_t{0});
  std::map<std::string, std::size_t> index;
  for (const auto& id : manifest.at("subjects")) {
    SubjectData s;
    s.id = id.get<std::string>();
    s.log = parse_event_log(dir / "logs" / (s.id + ".jsonl"), data.vocab);
    index[s.id] = data.subjects.size();
    data.subjects.push_back(std::move(s));
  }
  const auto labels_path = dir / "labels.csv";
  for (const auto& row : read_csv(labels_path, {"subject", "day", "pam"})) {
    auto it = index.find(row[0]);
    if (it == index.end()) fail(ErrorKind::kValidation, labels_path.string() + ": unknown subject " + row[0]);
    const auto day = parse_number<std::int64_t>(row[1], labels_path);
    const int score = parse_number<int>(row[2], labels_path);
    quantize_pam(score);
    data.subjects[it->second].pam[day] = score;
  }
  const auto gpa_path = dir / "gpa.csv";
  if (std::filesystem::exists(gpa_path)) {
    for (const auto& row : read_csv(gpa_path, {"subject", "gpa"})) {
      auto it = index.find(row[0]);
      if (it == index.end()) fail(ErrorKind::kValidation, gpa_path.string() + ": unknown subject " + row[0]);
      data.subjects[it->second].gpa = parse_number<double>(row[1], gpa_path);
    }
  }
  return data;
}

void save_dataset(const std::filesystem::path& dir, const RawDataset& data) {
  std::filesystem::create_directories(dir / "logs");
  nlohmann::ordered_json manifest;
  manifest["format"] = 1;
  manifest["day_origin"] = data.day_origin;
  std::vector<std::string> ids;
  for (const auto& s : data.subjects) ids.push_back(s.id);
  manifest["subjects"] = ids;
  std::ofstream(dir / "dataset.json", std::ios::binary) << manifest.dump(2) << '\n';
  data.vocab.save(dir / "vocab.json");
  std::ofstream labels(dir / "labels.csv", std::ios::binary);
  labels << "subject,day,pam\n";
  bool any_gpa = false;
  for (const auto& s : data.subjects) {
    write_event_log(dir / "logs" / (s.id + ".jsonl"), s.log);
    for (const auto& [day, score] : s.pam) labels << s.id << ',' << day << ',' << score << '\n';
    any_gpa = any_gpa || s.gpa.has_value();
  }
  if (any_gpa) {
    std::ofstream gpa(dir / "gpa.csv", std::ios::binary);
    gpa << "subject,gpa\n";
    char buf[64];
    for (const auto& s : data.subjects)
      if (s.gpa) {
        std::snprintf(buf, sizeof buf, "%.4f", *s.gpa);
        gpa << s.id << ',' << buf << '\n';
      }
  }
}

std::vector<std::pair<std::int64_t, int>> anchor_days(const std::map<std::int64_t, int>& labels,
                                                      std::size_t span) {
  if (span == 0) fail(ErrorKind::kUsage, "span must be at least 1");
  std::vector<std::pair<std::int64_t, int>> out;
  for (const auto& [day, label] : labels)
    if (day >= static_cast<std::int64_t>(span) - 1) out.emplace_back(day, label);
  return out;
}

std::vector<const GraphInput*> PreparedDataset::days(const PreparedSample& s) const {
  std::vector<const GraphInput*> out;
  out.reserve(s.graphs.size());
  for (auto g : s.graphs) out.push_back(&inputs[g]);
  return out;
}

std::vector<std::vector<const GraphInput*>> PreparedDataset::subject_windows(std::size_t subject) const {
  std::vector<std::vector<const GraphInput*>> out;
  const auto& days = subject_days.at(subject);
  for (std::size_t anchor = span - 1; anchor < days.size(); ++anchor) {
    std::vector<const GraphInput*> w;
    for (std::size_t d = anchor + 1 - span; d <= anchor; ++d) w.push_back(&inputs[days[d]]);
    out.push_back(std::move(w));
  }
  return out;
}

PreparedDataset prepare_dataset(const RawDataset& data, const EmbeddingTable& table,
                                const GnnConfig& config, std::size_t span) {
  PreparedDataset out;
  out.span = span;
  for (std::size_t si = 0; si < data.subjects.size(); ++si) {
    const auto& subject = data.subjects[si];
    out.subject_ids.push_back(subject.id);
    const auto labels = subject.labels();
    std::int64_t n_days = day_count(subject.log, data.day_origin);
    if (!labels.empty()) n_days = std::max(n_days, labels.rbegin()->first + 1);
    std::vector<std::size_t> day_graph;
    for (std::int64_t d = 0; d < n_days; ++d) {
      day_graph.push_back(out.graphs.size());
      const DayWindow window = slice_day(subject.log, d, data.day_origin);
      out.features.push_back(behavior_feature(window, data.vocab));
      out.graphs.push_back(build_local_graph(window, d, data.vocab, table));
      out.inputs.push_back(prepare_graph(out.graphs.back(), table, config));
    }
    for (const auto& [anchor, label] : anchor_days(labels, span)) {
      if (anchor < 0) continue;
      PreparedSample s;
      s.subject = si;
      s.anchor_day = anchor;
      s.label = label;
      for (std::int64_t d = anchor + 1 - static_cast<std::int64_t>(span); d <= anchor; ++d)
        s.graphs.push_back(day_graph[static_cast<std::size_t>(d)]);
      out.samples.push_back(std::move(s));
    }
    out.subject_days.push_back(std::move(day_graph));
  }
  return out;
}

}  // namespace lgbg
