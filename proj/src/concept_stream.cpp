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

#include "lgbg/concept_stream.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "lgbg/error.hpp"

namespace lgbg {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string_view stream_name(StreamType s) {
  switch (s) {
    case StreamType::kActivity: return "activity";
    case StreamType::kAudio: return "audio";
    case StreamType::kLocation: return "location";
  }
  return "?";
}

StreamType parse_stream(std::string_view name) {
  for (StreamType s : kAllStreams)
    if (stream_name(s) == name) return s;
  fail(ErrorKind::kVocabulary, "unknown stream type '" + std::string(name) + "'");
}

const std::vector<std::string>& activity_concepts() {
  static const std::vector<std::string> v{"stationary", "walking", "running", "unknown"};
  return v;
}

const std::vector<std::string>& audio_concepts() {
  static const std::vector<std::string> v{"silence", "voice", "noise", "other"};
  return v;
}

Vocabulary Vocabulary::with_locations(std::vector<std::string> locations) {
  Vocabulary v;
  if (std::find(locations.begin(), locations.end(), kOtherLocation) == locations.end())
    locations.emplace_back(kOtherLocation);
  if (locations.size() > kMaxLocations)
    fail(ErrorKind::kVocabulary, "location vocabulary has " + std::to_string(locations.size()) +
                                     " entries (including other-location); at most 100 allowed");
  v.concepts_[0] = activity_concepts();
  v.concepts_[1] = audio_concepts();
  v.concepts_[2] = std::move(locations);
  for (std::size_t s = 0; s < kStreamCount; ++s) {
    for (std::size_t i = 0; i < v.concepts_[s].size(); ++i) {
      const auto& name = v.concepts_[s][i];
      if (name.empty()) fail(ErrorKind::kVocabulary, "empty concept name");
      if (!v.index_[s].emplace(name, i).second)
        fail(ErrorKind::kVocabulary, "duplicate concept '" + name + "'");
    }
  }
  return v;
}

Vocabulary Vocabulary::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("vocabulary: ") + e.what());
  }
  if (!j.is_object() || j.value("format", 0) != kFormatVersion)
    fail(ErrorKind::kParse, "vocabulary: expected an object with \"format\": 1");
  auto check_fixed = [&](const char* key, const std::vector<std::string>& expected) {
    if (!j.contains(key)) return;
    if (j[key].get<std::vector<std::string>>() != expected)
      fail(ErrorKind::kVocabulary, std::string("vocabulary: the ") + key +
                                       " list is fixed and must match the built-in order");
  };
  try {
    check_fixed("activity", activity_concepts());
    check_fixed("audio", audio_concepts());
    if (!j.contains("location")) fail(ErrorKind::kParse, "vocabulary: missing \"location\" list");
    return with_locations(j["location"].get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("vocabulary: ") + e.what());
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

std::string Vocabulary::to_json_text() const {
  ordered_json j;
  j["format"] = kFormatVersion;
  for (StreamType s : kAllStreams) j[std::string(stream_name(s))] = concepts(s);
  return j.dump(2) + "\n";
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << to_json_text();
}

bool Vocabulary::contains(StreamType s, std::string_view concept_name) const {
  const auto& idx = index_[stream_index(s)];
  return idx.find(concept_name) != idx.end();
}

std::size_t Vocabulary::local_index(StreamType s, std::string_view concept_name) const {
  const auto& idx = index_[stream_index(s)];
  auto it = idx.find(concept_name);
  if (it == idx.end())
    fail(ErrorKind::kVocabulary, "concept '" + std::string(concept_name) + "' is not in the " +
                                     std::string(stream_name(s)) + " vocabulary");
  return it->second;
}

std::size_t Vocabulary::global_index(StreamType s, std::string_view concept_name) const {
  std::size_t offset = 0;
  for (std::size_t k = 0; k < stream_index(s); ++k) offset += concepts_[k].size();
  return offset + local_index(s, concept_name);
}

std::size_t Vocabulary::total_size() const {
  std::size_t n = 0;
  for (const auto& c : concepts_) n += c.size();
  return n;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (StreamType s : kAllStreams) {
    for (char c : stream_name(s)) mix(static_cast<unsigned char>(c));
    mix(0);
    for (const auto& name : concepts(s)) {
      for (char c : name) mix(static_cast<unsigned char>(c));
      mix(0);
    }
    mix(1);
  }
  return h;
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto& s : streams) n += s.size();
  return n;
}

EventLog make_event_log(std::vector<ConceptEvent> events, const Vocabulary& vocab) {
  EventLog log;
  for (auto& e : events) {
    if (e.start >= e.end)
      fail(ErrorKind::kValidation, "event '" + e.concept_name + "' has start >= end (" +
                                       std::to_string(e.start) + " >= " + std::to_string(e.end) + ")");
    if (!vocab.contains(e.stream, e.concept_name)) {
      if (e.stream != StreamType::kLocation)
        fail(ErrorKind::kVocabulary, "concept '" + e.concept_name + "' is not in the " +
                                         std::string(stream_name(e.stream)) + " vocabulary");
      e.concept_name = std::string(kOtherLocation);
      ++log.unlisted_locations;
    }
    log.streams[stream_index(e.stream)].push_back(std::move(e));
  }
  for (auto& s : log.streams) {
    std::sort(s.begin(), s.end(), [](const ConceptEvent& a, const ConceptEvent& b) {
      return std::tie(a.start, a.end, a.concept_name) < std::tie(b.start, b.end, b.concept_name);
    });
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return log;
}

EventLog parse_event_log(std::istream& in, const Vocabulary& vocab) {
  std::vector<ConceptEvent> events;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorKind::kParse, where + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::kParse, where + "expected a JSON object");
    if (!header_seen) {
      if (!j.contains("format") || !j["format"].is_number_integer() || j["format"].get<int>() != kFormatVersion)
        fail(ErrorKind::kParse, where + "expected header {\"format\": 1}");
      header_seen = true;
      continue;
    }
    for (const char* key : {"stream", "concept"})
      if (!j.contains(key) || !j[key].is_string())
        fail(ErrorKind::kParse, where + "missing string field \"" + key + "\"");
    for (const char* key : {"start", "end"})
      if (!j.contains(key) || !j[key].is_number_integer())
        fail(ErrorKind::kParse, where + "missing integer field \"" + key + "\"");
    ConceptEvent e;
    try {
      e.stream = parse_stream(j["stream"].get<std::string>());
    } catch (const Error& err) {
      fail(err.kind(), where + err.what());
    }
    e.concept_name = j["concept"].get<std::string>();
    e.start = j["start"].get<std::int64_t>();
    e.end = j["end"].get<std::int64_t>();
    if (e.start >= e.end)
      fail(ErrorKind::kValidation, where + "start must be before end");
    events.push_back(std::move(e));
  }
  return make_event_log(std::move(events), vocab);
}

EventLog parse_event_log(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return parse_event_log(in, vocab);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

void write_event_log(std::ostream& out, const EventLog& log) {
  out << "{\"format\":1}\n";
  for (const auto& s : log.streams) {
    for (const auto& e : s) {
      ordered_json j;
      j["stream"] = stream_name(e.stream);
      j["concept"] = e.concept_name;
      j["start"] = e.start;
      j["end"] = e.end;
      out << j.dump() << '\n';
    }
  }
}

void write_event_log(const std::filesystem::path& path, const EventLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write_event_log(out, log);
}

bool DayWindow::empty() const {
  return std::all_of(streams.begin(), streams.end(), [](const auto& s) { return s.empty(); });
}

DayWindow slice_day(const EventLog& log, std::int64_t day_index, std::int64_t day_origin) {
  if (day_index < 0) fail(ErrorKind::kUsage, "slice_day: negative day index");
  DayWindow w;
  w.day_start = day_origin + kSecondsPerDay * day_index;
  w.day_end = w.day_start + kSecondsPerDay;
  for (std::size_t s = 0; s < kStreamCount; ++s) {
    for (const auto& e : log.streams[s]) {
      if (e.start >= w.day_end) break;  // streams are sorted by start
      const std::int64_t lo = std::max(e.start, w.day_start);
      const std::int64_t hi = std::min(e.end, w.day_end);
      if (lo >= hi) continue;
      ConceptEvent clipped = e;
      clipped.start = lo;
      clipped.end = hi;
      w.streams[s].push_back(std::move(clipped));
    }
  }
  return w;
}

std::int64_t default_day_origin(const EventLog& log) {
  bool any = false;
  std::int64_t earliest = 0;
  for (const auto& s : log.streams)
    if (!s.empty() && (!any || s.front().start < earliest)) {
      earliest = s.front().start;
      any = true;
    }
  if (!any) return 0;
  // floor division, valid for negative timestamps too
  std::int64_t q = earliest / kSecondsPerDay;
  if (earliest % kSecondsPerDay != 0 && earliest < 0) --q;
  return q * kSecondsPerDay;
}

std::int64_t day_count(const EventLog& log, std::int64_t day_origin) {
  std::int64_t last_end = day_origin;
  bool any = false;
  for (const auto& s : log.streams)
    for (const auto& e : s) {
      last_end = std::max(last_end, e.end);
      any = true;
    }
  if (!any || last_end <= day_origin) return 0;
  return (last_end - day_origin + kSecondsPerDay - 1) / kSecondsPerDay;
}

double duration_attribute(const DayWindow& window, StreamType stream,
                          std::string_view concept_name, const Vocabulary& vocab) {
  vocab.local_index(stream, concept_name);  // validates
  std::int64_t seconds = 0;
  for (const auto& e : window.streams[stream_index(stream)])
    if (e.concept_name == concept_name) seconds += e.duration();
  return static_cast<double>(seconds) / 3600.0;
}

BehaviorFeature behavior_feature(const DayWindow& window, const Vocabulary& vocab) {
  BehaviorFeature f{};
  const std::array<std::size_t, kStreamCount> offsets{0, 4, 8};
  for (StreamType s : kAllStreams) {
    std::vector<std::int64_t> seconds(vocab.concepts(s).size(), 0);
    for (const auto& e : window.streams[stream_index(s)])
      seconds[vocab.local_index(s, e.concept_name)] += e.duration();
    for (std::size_t i = 0; i < seconds.size(); ++i)
      f[offsets[stream_index(s)] + i] = static_cast<double>(seconds[i]) / 3600.0;
  }
  return f;
}

}  // namespace lgbg
