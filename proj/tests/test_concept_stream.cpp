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

#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lgbg/concept_stream.hpp"
#include "lgbg/error.hpp"

using namespace lgbg;

namespace {

const Vocabulary& vocab() {
  static const Vocabulary v = Vocabulary::with_locations({"dorm", "library", "gym"});
  return v;
}

std::string record(std::string_view stream, std::string_view name, std::int64_t start, std::int64_t end) {
  std::ostringstream os;
  os << R"({"stream":")" << stream << R"(","concept":")" << name << R"(","start":)" << start << R"(,"end":)" << end
     << "}\n";
  return os.str();
}

EventLog parse(const std::string& text) {
  std::istringstream in(text);
  return parse_event_log(in, vocab());
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

std::vector<ConceptEvent> random_events(std::mt19937_64& rng, std::size_t n, std::int64_t horizon) {
  const std::vector<std::pair<StreamType, std::vector<std::string>>> pools{
      {StreamType::kActivity, activity_concepts()},
      {StreamType::kAudio, audio_concepts()},
      {StreamType::kLocation, {"dorm", "library", "gym"}}};
  std::vector<ConceptEvent> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [s, names] = pools[rng() % 3];
    const std::int64_t start = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(horizon));
    const std::int64_t len = 1 + static_cast<std::int64_t>(rng() % 20000);
    out.push_back({s, names[rng() % names.size()], start, start + len});
  }
  return out;
}

double total_hours(const StreamEvents& streams) {
  double h = 0;
  for (const auto& s : streams)
    for (const auto& e : s) h += static_cast<double>(e.duration()) / 3600.0;
  return h;
}

}  // namespace

TEST_SUITE("concept_stream") {
  TEST_CASE("fixed vocabularies have four entries") {
    CHECK(activity_concepts() == std::vector<std::string>{"stationary", "walking", "running", "unknown"});
    CHECK(audio_concepts() == std::vector<std::string>{"silence", "voice", "noise", "other"});
    CHECK(vocab().concepts(StreamType::kLocation).back() == kOtherLocation);
  }

  TEST_CASE("location vocabulary is capped at 100 entries") {
    std::vector<std::string> locs;
    for (int i = 0; i < 99; ++i) locs.push_back("loc" + std::to_string(i));
    CHECK(Vocabulary::with_locations(locs).concepts(StreamType::kLocation).size() == 100);
    locs.push_back("loc99");
    CHECK(kind_of([&] { Vocabulary::with_locations(locs); }) == ErrorKind::kVocabulary);
  }

  TEST_CASE("vocabulary file round trip") {
    const auto text = vocab().to_json_text();
    const auto back = Vocabulary::from_json_text(text);
    CHECK(back.concepts(StreamType::kLocation) == vocab().concepts(StreamType::kLocation));
    CHECK(back.hash() == vocab().hash());
    CHECK(kind_of([] { Vocabulary::from_json_text(R"({"format":2,"location":[]})"); }) == ErrorKind::kParse);
  }

  TEST_CASE("empty file gives three empty streams") {
    const auto log = parse("");
    for (const auto& s : log.streams) CHECK(s.empty());
    const auto header_only = parse("{\"format\":1}\n");
    CHECK(header_only.event_count() == 0);
  }

  TEST_CASE("one activity record") {
    const auto log = parse("{\"format\":1}\n" + record("activity", "walking", 0, 3600));
    const auto& a = log.streams[stream_index(StreamType::kActivity)];
    REQUIRE(a.size() == 1);
    CHECK(a[0].concept_name == "walking");
    CHECK(a[0].duration() == 3600);
  }

  TEST_CASE("parse errors carry the right kind and line number") {
    const std::string h = "{\"format\":1}\n";
    try {
      parse(h + record("activity", "walking", 0, 10) + "{not json\n");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kParse);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(kind_of([&] { parse(h + record("gps", "x", 0, 10)); }) == ErrorKind::kVocabulary);
    CHECK(kind_of([&] { parse(h + record("activity", "flying", 0, 10)); }) == ErrorKind::kVocabulary);
    CHECK(kind_of([&] { parse(h + record("activity", "walking", 10, 10)); }) == ErrorKind::kValidation);
    CHECK(kind_of([&] { parse(h + record("activity", "walking", 20, 10)); }) == ErrorKind::kValidation);
    CHECK(kind_of([&] { parse(record("activity", "walking", 0, 10)); }) == ErrorKind::kParse);
  }

  TEST_CASE("unlisted locations map to other-location and are counted") {
    const auto log = parse("{\"format\":1}\n" + record("location", "moon", 0, 10) + record("location", "dorm", 10, 20));
    const auto& l = log.streams[stream_index(StreamType::kLocation)];
    REQUIRE(l.size() == 2);
    CHECK(l[0].concept_name == kOtherLocation);
    CHECK(log.unlisted_locations == 1);
  }

  TEST_CASE("out-of-order lines are sorted and duplicates dropped") {
    std::mt19937_64 rng(5);
    auto events = random_events(rng, 300, 3 * kSecondsPerDay);
    events.push_back(events[7]);
    std::string text = "{\"format\":1}\n";
    for (const auto& e : events) text += record(stream_name(e.stream), e.concept_name, e.start, e.end);
    const auto log = parse(text);

    for (StreamType s : kAllStreams) {
      std::vector<ConceptEvent> expect;
      for (const auto& e : events)
        if (e.stream == s) expect.push_back(e);
      std::sort(expect.begin(), expect.end(), [](const ConceptEvent& a, const ConceptEvent& b) {
        return std::tie(a.start, a.end, a.concept_name) < std::tie(b.start, b.end, b.concept_name);
      });
      expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
      CHECK(log.streams[stream_index(s)] == expect);
    }
  }

  TEST_CASE("parse, write, parse is the identity") {
    std::mt19937_64 rng(6);
    const auto log = make_event_log(random_events(rng, 120, kSecondsPerDay * 2), vocab());
    std::ostringstream out;
    write_event_log(out, log);
    const auto back = parse(out.str());
    CHECK(back.streams == log.streams);
  }

  TEST_CASE("slice_day splits an event straddling midnight") {
    const std::int64_t origin = 0;
    const auto log = make_event_log({{StreamType::kActivity, "walking", 23 * 3600, 25 * 3600}}, vocab());
    const auto d0 = slice_day(log, 0, origin);
    const auto d1 = slice_day(log, 1, origin);
    CHECK(duration_attribute(d0, StreamType::kActivity, "walking", vocab()) == doctest::Approx(1.0));
    CHECK(duration_attribute(d1, StreamType::kActivity, "walking", vocab()) == doctest::Approx(1.0));
    for (const auto& e : d1.streams[0]) {
      CHECK(e.start >= d1.day_start);
      CHECK(e.end <= d1.day_end);
    }
  }

  TEST_CASE("events inside a day keep their durations") {
    const auto log = make_event_log({{StreamType::kAudio, "voice", 100, 1900}, {StreamType::kAudio, "noise", 2000, 5600}},
                                    vocab());
    const auto d = slice_day(log, 0, 0);
    CHECK(d.streams[stream_index(StreamType::kAudio)] == log.streams[stream_index(StreamType::kAudio)]);
  }

  TEST_CASE("slicing conserves total time") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const auto log = make_event_log(random_events(rng, 80, 4 * kSecondsPerDay), vocab());
      const auto origin = default_day_origin(log);
      double sliced = 0;
      for (std::int64_t d = 0; d < day_count(log, origin); ++d) {
        const auto w = slice_day(log, d, origin);
        sliced += total_hours(w.streams);
        for (const auto& s : w.streams) CHECK(std::is_sorted(s.begin(), s.end(), [](auto& a, auto& b) { return a.start < b.start; }));
      }
      CHECK(sliced == doctest::Approx(total_hours(log.streams)).epsilon(1e-12));
    }
  }

  TEST_CASE("duration_attribute examples") {
    const auto log = make_event_log(
        {{StreamType::kActivity, "walking", 0, 1800}, {StreamType::kActivity, "walking", 7200, 9000}}, vocab());
    const auto d = slice_day(log, 0, 0);
    CHECK(duration_attribute(d, StreamType::kActivity, "walking", vocab()) == doctest::Approx(1.0));
    CHECK(duration_attribute(d, StreamType::kActivity, "running", vocab()) == 0.0);
    CHECK(kind_of([&] { duration_attribute(d, StreamType::kActivity, "flying", vocab()); }) == ErrorKind::kVocabulary);
  }

  TEST_CASE("duration_attribute matches per-second accumulation") {
    std::mt19937_64 rng(8);
    const auto log = make_event_log(random_events(rng, 60, kSecondsPerDay), vocab());
    const auto w = slice_day(log, 0, default_day_origin(log));
    for (StreamType s : kAllStreams)
      for (const auto& name : vocab().concepts(s)) {
        std::vector<char> covered;
        std::int64_t seconds = 0;
        for (const auto& e : w.streams[stream_index(s)])
          if (e.concept_name == name)
            for (std::int64_t t = e.start; t < e.end; ++t) ++seconds;
        CHECK(duration_attribute(w, s, name, vocab()) == doctest::Approx(seconds / 3600.0).epsilon(1e-12));
      }
  }

  TEST_CASE("behavior_feature examples") {
    const auto empty = behavior_feature(slice_day(EventLog{}, 0, 0), vocab());
    CHECK(std::all_of(empty.begin(), empty.end(), [](double v) { return v == 0.0; }));

    const auto log = make_event_log({{StreamType::kActivity, "stationary", 0, kSecondsPerDay}}, vocab());
    const auto f = behavior_feature(slice_day(log, 0, 0), vocab());
    CHECK(f[0] == doctest::Approx(24.0));
    CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(24.0));
  }

  TEST_CASE("behavior_feature agrees with duration_attribute and ignores input order") {
    std::mt19937_64 rng(9);
    auto events = random_events(rng, 50, kSecondsPerDay);
    const auto log = make_event_log(events, vocab());
    const auto w = slice_day(log, 0, default_day_origin(log));
    const auto f = behavior_feature(w, vocab());
    CHECK(f.size() == 108);
    const auto& locs = vocab().concepts(StreamType::kLocation);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(f[i] == duration_attribute(w, StreamType::kActivity, activity_concepts()[i], vocab()));
      CHECK(f[4 + i] == duration_attribute(w, StreamType::kAudio, audio_concepts()[i], vocab()));
    }
    for (std::size_t i = 0; i < 100; ++i) {
      const double expect = i < locs.size() ? duration_attribute(w, StreamType::kLocation, locs[i], vocab()) : 0.0;
      CHECK(f[8 + i] == expect);
      CHECK(f[8 + i] >= 0.0);
    }

    std::shuffle(events.begin(), events.end(), rng);
    const auto log2 = make_event_log(events, vocab());
    CHECK(behavior_feature(slice_day(log2, 0, default_day_origin(log2)), vocab()) == f);
  }
}
