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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lgbg {

enum class StreamType : std::uint8_t { kActivity = 0, kAudio = 1, kLocation = 2 };

inline constexpr std::size_t kStreamCount = 3;
inline constexpr std::array<StreamType, kStreamCount> kAllStreams{
    StreamType::kActivity, StreamType::kAudio, StreamType::kLocation};
inline constexpr std::size_t kMaxLocations = 100;
inline constexpr std::size_t kBehaviorFeatureSize = 4 + 4 + kMaxLocations;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::string_view kOtherLocation = "other-location";

std::string_view stream_name(StreamType s);
StreamType parse_stream(std::string_view name);
inline std::size_t stream_index(StreamType s) { return static_cast<std::size_t>(s); }

// Concept vocabularies. Activity and audio are fixed; the location list comes
// from a vocabulary file and always ends up containing `other-location`.
class Vocabulary {
 public:
  static Vocabulary with_locations(std::vector<std::string> locations);
  static Vocabulary load(const std::filesystem::path& path);
  static Vocabulary from_json_text(std::string_view text);
  std::string to_json_text() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<std::string>& concepts(StreamType s) const { return concepts_[stream_index(s)]; }
  bool contains(StreamType s, std::string_view concept_name) const;
  // Position of the concept inside its stream's list.
  std::size_t local_index(StreamType s, std::string_view concept_name) const;
  // Position across all streams (activity, then audio, then location).
  std::size_t global_index(StreamType s, std::string_view concept_name) const;
  std::size_t total_size() const;

  // FNV-1a over the canonical serialization; stable across platforms.
  std::uint64_t hash() const;

 private:
  std::array<std::vector<std::string>, kStreamCount> concepts_;
  std::array<std::map<std::string, std::size_t, std::less<>>, kStreamCount> index_;
};

const std::vector<std::string>& activity_concepts();
const std::vector<std::string>& audio_concepts();

struct ConceptEvent {
  StreamType stream = StreamType::kActivity;
  std::string concept_name;
  std::int64_t start = 0;  // seconds
  std::int64_t end = 0;    // seconds, exclusive

  std::int64_t duration() const noexcept { return end - start; }
  auto operator<=>(const ConceptEvent&) const = default;
};

using StreamEvents = std::array<std::vector<ConceptEvent>, kStreamCount>;

struct EventLog {
  StreamEvents streams;
  // Records whose location was not listed and was mapped to other-location.
  std::size_t unlisted_locations = 0;

  std::size_t event_count() const;
};

// Validates, maps unlisted locations, sorts each stream by (start, end,
// concept) and drops exact duplicates.
EventLog make_event_log(std::vector<ConceptEvent> events, const Vocabulary& vocab);

EventLog parse_event_log(const std::filesystem::path& path, const Vocabulary& vocab);
EventLog parse_event_log(std::istream& in, const Vocabulary& vocab);
void write_event_log(std::ostream& out, const EventLog& log);
void write_event_log(const std::filesystem::path& path, const EventLog& log);

struct DayWindow {
  std::int64_t day_start = 0;
  std::int64_t day_end = 0;
  StreamEvents streams;

  bool empty() const;
};

DayWindow slice_day(const EventLog& log, std::int64_t day_index, std::int64_t day_origin);

// Midnight (naive, epoch-aligned) of the earliest event's day; 0 for an empty log.
std::int64_t default_day_origin(const EventLog& log);
// Number of days from the origin through the day holding the last event end.
std::int64_t day_count(const EventLog& log, std::int64_t day_origin);

double duration_attribute(const DayWindow& window, StreamType stream,
                          std::string_view concept_name, const Vocabulary& vocab);

using BehaviorFeature = std::array<double, kBehaviorFeatureSize>;

// Hours per concept: activity[4], audio[4], location[100] in vocabulary order.
BehaviorFeature behavior_feature(const DayWindow& window, const Vocabulary& vocab);

}  // namespace lgbg
