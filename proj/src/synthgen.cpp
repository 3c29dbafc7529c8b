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

#include "lgbg/synthgen.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "lgbg/error.hpp"

namespace lgbg {

namespace {

using json = nlohmann::json;

const std::vector<std::string>& location_pool() {
  static const std::vector<std::string> v{"dorm", "library", "cafeteria", "gym",  "classroom", "lab",
                                          "cafe", "office",  "park",      "bookstore", "chapel", "theater",
                                          "hospital", "museum", "stadium", "pool"};
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

StreamTemplate cycle(std::vector<std::string> c) { return {StreamMode::kCycle, std::move(c)}; }
StreamTemplate iid(std::vector<std::string> c) { return {StreamMode::kIid, std::move(c)}; }

std::vector<std::string> pick(const std::vector<std::string>& from, std::initializer_list<std::size_t> idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(from[i]);
  return out;
}

std::vector<std::string> rotate_left(std::vector<std::string> v, std::size_t k) {
  std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k % v.size()), v.end());
  return v;
}

// Directed location cycles that share one node set but no transition multiset.
constexpr std::array<std::array<std::size_t, 4>, 4> kOrders{{{0, 1, 2, 3}, {0, 3, 2, 1}, {0, 1, 3, 2}, {0, 2, 1, 3}}};

std::vector<std::string> ordered(const std::vector<std::string>& four, std::size_t cls) {
  const auto& o = kOrders[cls];
  return pick(four, {o[0], o[1], o[2], o[3]});
}

std::vector<std::string> block(std::size_t cls) {
  const auto& p = location_pool();
  return {p.begin() + static_cast<std::ptrdiff_t>(4 * cls), p.begin() + static_cast<std::ptrdiff_t>(4 * cls + 4)};
}

const char* mode_name(StreamMode m) { return m == StreamMode::kCycle ? "cycle" : "iid"; }

StreamMode parse_mode(const std::string& s) {
  if (s == "cycle") return StreamMode::kCycle;
  if (s == "iid") return StreamMode::kIid;
  fail(ErrorKind::kValidation, "unknown stream mode '" + s + "' (expected cycle or iid)");
}

// Concept emitted by stream s of a class template at a slot, given the phase.
const std::string& template_concept(const StreamTemplate& t, std::size_t phase, std::size_t slot,
                                    std::mt19937_64& rng) {
  if (t.mode == StreamMode::kCycle) return t.concepts[(phase + slot) % t.concepts.size()];
  return t.concepts[draw(rng, t.concepts.size())];
}

}  // namespace

std::vector<std::string> builtin_scenarios() { return {"presence", "transition", "cooccurrence", "combined"}; }

ScenarioSpec builtin_scenario(std::string_view name) {
  ScenarioSpec spec;
  spec.name = std::string(name);
  spec.locations = location_pool();
  const auto& act = activity_concepts();
  const auto& aud = audio_concepts();
  const auto shared = block(0);
  for (std::size_t c = 0; c < 4; ++c) {
    DayTemplate& t = spec.templates[c];
    t[stream_index(StreamType::kActivity)] = iid(act);
    t[stream_index(StreamType::kAudio)] = iid(aud);
    if (name == "presence") {
      t[stream_index(StreamType::kLocation)] = cycle(block(c));
    } else if (name == "transition") {
      t[stream_index(StreamType::kLocation)] = cycle(ordered(shared, c));
    } else if (name == "cooccurrence") {
      t[stream_index(StreamType::kLocation)] = cycle(shared);
      t[stream_index(StreamType::kAudio)] = cycle(rotate_left(aud, c));
    } else if (name == "combined") {
      t[stream_index(StreamType::kLocation)] = cycle(ordered(block(c), c));
      t[stream_index(StreamType::kAudio)] = cycle(rotate_left(aud, c));
    } else {
      fail(ErrorKind::kValidation, "unknown scenario '" + std::string(name) + "'");
    }
  }
  return spec;
}

void ScenarioSpec::validate() const {
  if (!(noise >= 0.0 && noise <= 1.0)) fail(ErrorKind::kValidation, "noise must be in [0, 1]");
  if (!(label_density >= 0.0 && label_density <= 1.0))
    fail(ErrorKind::kValidation, "label_density must be in [0, 1]");
  if (subjects == 0 || days == 0) fail(ErrorKind::kValidation, "subjects and days must be positive");
  if (slots_per_day == 0 || kSecondsPerDay % static_cast<std::int64_t>(slots_per_day) != 0)
    fail(ErrorKind::kValidation, "slots_per_day must divide 86400");
  if (grade.gpa_noise < 0.0) fail(ErrorKind::kValidation, "gpa_noise must be >= 0");
  const auto vocab = Vocabulary::with_locations(locations);  // enforces the location limit
  for (std::size_t c = 0; c < templates.size(); ++c) {
    for (StreamType s : kAllStreams) {
      const auto& t = templates[c][stream_index(s)];
      const std::string where = "template " + std::to_string(c) + " " + std::string(stream_name(s));
      if (t.concepts.empty()) fail(ErrorKind::kValidation, where + ": no concepts");
      for (const auto& name : t.concepts)
        if (!vocab.contains(s, name) || name == kOtherLocation)
          fail(ErrorKind::kValidation, where + ": concept '" + name + "' is not in the vocabulary");
    }
  }
  // Two classes are separable when, for every pair of phases, some slot of a
  // stream that both templates cycle disagrees.
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) {
      bool separable = true;
      for (std::size_t pa = 0; pa < slots_per_day && separable; ++pa)
        for (std::size_t pb = 0; pb < slots_per_day && separable; ++pb) {
          bool differs = false;
          for (StreamType s : kAllStreams) {
            const auto& ta = templates[a][stream_index(s)];
            const auto& tb = templates[b][stream_index(s)];
            if (ta.mode != StreamMode::kCycle || tb.mode != StreamMode::kCycle) continue;
            for (std::size_t k = 0; k < slots_per_day && !differs; ++k)
              differs = ta.concepts[(pa + k) % ta.concepts.size()] != tb.concepts[(pb + k) % tb.concepts.size()];
          }
          separable = differs;
        }
      if (!separable)
        fail(ErrorKind::kValidation,
             "templates " + std::to_string(a) + " and " + std::to_string(b) + " are not distinguishable");
    }
}

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "scenario spec must be a JSON object");
  try {
    ScenarioSpec spec = builtin_scenario(j.value("scenario", std::string("combined")));
    if (j.contains("locations")) spec.locations = j.at("locations").get<std::vector<std::string>>();
    if (j.contains("templates")) {
      const auto& arr = j.at("templates");
      if (!arr.is_array() || arr.size() != 4) fail(ErrorKind::kValidation, "templates must list 4 classes");
      for (std::size_t c = 0; c < 4; ++c)
        for (StreamType s : kAllStreams) {
          const auto& t = arr[c].at(std::string(stream_name(s)));
          spec.templates[c][stream_index(s)] = {parse_mode(t.at("mode").get<std::string>()),
                                                t.at("concepts").get<std::vector<std::string>>()};
        }
      spec.name = j.value("scenario", std::string("custom"));
    }
    spec.noise = j.value("noise", spec.noise);
    spec.subjects = j.value("subjects", spec.subjects);
    spec.days = j.value("days", spec.days);
    spec.label_density = j.value("label_density", spec.label_density);
    spec.seed = j.value("seed", spec.seed);
    spec.slots_per_day = j.value("slots_per_day", spec.slots_per_day);
    spec.day_origin = j.value("day_origin", spec.day_origin);
    const std::string schedule = j.value("schedule", std::string("random"));
    if (schedule == "random") spec.schedule = ClassSchedule::kRandom;
    else if (schedule == "cycle") spec.schedule = ClassSchedule::kCycle;
    else fail(ErrorKind::kValidation, "unknown schedule '" + schedule + "'");
    if (j.contains("grade")) {
      spec.grade.enabled = j.at("grade").value("enabled", true);
      spec.grade.gpa_noise = j.at("grade").value("gpa_noise", spec.grade.gpa_noise);
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("scenario spec: ") + e.what());
  }
}

json scenario_to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json j;
  j["scenario"] = spec.name;
  j["noise"] = spec.noise;
  j["subjects"] = spec.subjects;
  j["days"] = spec.days;
  j["label_density"] = spec.label_density;
  j["seed"] = spec.seed;
  j["slots_per_day"] = spec.slots_per_day;
  j["day_origin"] = spec.day_origin;
  j["schedule"] = spec.schedule == ClassSchedule::kCycle ? "cycle" : "random";
  j["grade"] = {{"enabled", spec.grade.enabled}, {"gpa_noise", spec.grade.gpa_noise}};
  j["locations"] = spec.locations;
  auto& arr = j["templates"] = nlohmann::ordered_json::array();
  for (const auto& t : spec.templates) {
    nlohmann::ordered_json cls;
    for (StreamType s : kAllStreams)
      cls[std::string(stream_name(s))] = {{"mode", mode_name(t[stream_index(s)].mode)},
                                          {"concepts", t[stream_index(s)].concepts}};
    arr.push_back(cls);
  }
  return json(j);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open scenario spec " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kParse, "scenario spec " + path.string() + " is not valid JSON");
  return scenario_from_json(j);
}

SynthDataset generate(const ScenarioSpec& spec) {
  spec.validate();
  SynthDataset out;
  out.data.vocab = Vocabulary::with_locations(spec.locations);
  out.data.day_origin = spec.day_origin;
  out.data.subjects.resize(spec.subjects);
  out.day_class.resize(spec.subjects);

  // Noise draws come from concepts any template may emit, per stream.
  std::array<std::vector<std::string>, kStreamCount> noise_pool;
  for (StreamType s : kAllStreams) {
    std::set<std::string> seen;
    for (const auto& t : spec.templates)
      for (const auto& c : t[stream_index(s)].concepts)
        if (seen.insert(c).second) noise_pool[stream_index(s)].push_back(c);
  }

  const std::int64_t slot_len = kSecondsPerDay / static_cast<std::int64_t>(spec.slots_per_day);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(spec.subjects); ++si) {
    try {
      const auto subject = static_cast<std::size_t>(si);
      std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(subject + 1)));
      SubjectData& sd = out.data.subjects[subject];
      char id[32];
      std::snprintf(id, sizeof id, "s%03zu", subject);
      sd.id = id;
      const double u = uniform01(rng);
      std::vector<ConceptEvent> events;
      std::vector<int>& classes = out.day_class[subject];
      double class_sum = 0.0;
      for (std::size_t d = 0; d < spec.days; ++d) {
        int cls;
        if (spec.grade.enabled) {
          cls = 0;
          for (int k = 0; k < 3; ++k) cls += uniform01(rng) < u;
        } else if (spec.schedule == ClassSchedule::kCycle) {
          cls = static_cast<int>(d % 4);
        } else {
          cls = static_cast<int>(draw(rng, 4));
        }
        classes.push_back(cls);
        class_sum += cls;
        const DayTemplate& t = spec.templates[static_cast<std::size_t>(cls)];
        const std::size_t phase = draw(rng, spec.slots_per_day);
        const std::int64_t day_start = spec.day_origin + static_cast<std::int64_t>(d) * kSecondsPerDay;
        for (std::size_t k = 0; k < spec.slots_per_day; ++k) {
          const bool noisy = uniform01(rng) < spec.noise;
          const std::int64_t start = day_start + static_cast<std::int64_t>(k) * slot_len;
          for (StreamType s : kAllStreams) {
            const auto& pool = noise_pool[stream_index(s)];
            const std::string& name =
                noisy ? pool[draw(rng, pool.size())] : template_concept(t[stream_index(s)], phase, k, rng);
            events.push_back({s, name, start, start + slot_len});
          }
        }
        if (uniform01(rng) < spec.label_density)
          sd.pam[static_cast<std::int64_t>(d)] = 4 * cls + 1 + static_cast<int>(draw(rng, 4));
      }
      sd.log = make_event_log(std::move(events), out.data.vocab);
      if (spec.grade.enabled) {
        std::normal_distribution<double> noise(0.0, spec.grade.gpa_noise);
        const double mean_class = class_sum / static_cast<double>(spec.days);
        sd.gpa = 1.0 + 2.5 * mean_class / 3.0 + (spec.grade.gpa_noise > 0 ? noise(rng) : 0.0);
      }
    } catch (...) {
#pragma omp critical(lgbg_synth_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::optional<int> oracle_label(const DayWindow& day, const ScenarioSpec& spec, double min_match) {
  const std::size_t slots = spec.slots_per_day;
  const std::int64_t slot_len = kSecondsPerDay / static_cast<std::int64_t>(slots);
  // Observed concept per (stream, slot), by event midpoint.
  std::array<std::vector<const std::string*>, kStreamCount> seen;
  for (StreamType s : kAllStreams) {
    auto& row = seen[stream_index(s)];
    row.assign(slots, nullptr);
    for (const auto& e : day.streams[stream_index(s)]) {
      const std::int64_t mid = (e.start + e.end) / 2 - day.day_start;
      if (mid < 0 || mid >= kSecondsPerDay) continue;
      row[static_cast<std::size_t>(mid / slot_len)] = &e.concept_name;
    }
  }
  std::array<double, 4> score{};
  for (std::size_t c = 0; c < 4; ++c) {
    const DayTemplate& t = spec.templates[c];
    for (std::size_t phase = 0; phase < slots; ++phase) {
      std::size_t hits = 0, total = 0;
      for (StreamType s : kAllStreams) {
        const auto& st = t[stream_index(s)];
        if (st.mode != StreamMode::kCycle) continue;
        for (std::size_t k = 0; k < slots; ++k) {
          ++total;
          const std::string* got = seen[stream_index(s)][k];
          hits += got && *got == st.concepts[(phase + k) % st.concepts.size()];
        }
      }
      if (total) score[c] = std::max(score[c], static_cast<double>(hits) / static_cast<double>(total));
    }
  }
  const auto best = std::max_element(score.begin(), score.end());
  if (*best < min_match || std::count(score.begin(), score.end(), *best) > 1) return std::nullopt;
  return static_cast<int>(best - score.begin());
}

}  // namespace lgbg
