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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lgbg/concept_stream.hpp"
#include "lgbg/dataset.hpp"

namespace lgbg {

// How one stream fills the day's slots under a class template.
//   kCycle: concepts[(phase + slot) % size], phase drawn once per day and
//           shared by every stream of that day.
//   kIid:   an independent uniform draw from `concepts` per slot.
enum class StreamMode { kCycle, kIid };

struct StreamTemplate {
  StreamMode mode = StreamMode::kIid;
  std::vector<std::string> concepts;
};

using DayTemplate = std::array<StreamTemplate, kStreamCount>;

enum class ClassSchedule { kRandom, kCycle };

struct GradeCohort {
  bool enabled = false;
  double gpa_noise = 0.1;
};

struct ScenarioSpec {
  std::string name = "combined";
  std::array<DayTemplate, 4> templates;
  std::vector<std::string> locations;
  double noise = 0.0;  // probability that a slot ignores the template
  std::size_t subjects = 40;
  std::size_t days = 30;
  double label_density = 1.0;  // probability that a day carries a PAM label
  std::uint64_t seed = 7;
  std::size_t slots_per_day = 12;
  std::int64_t day_origin = 1599955200;
  ClassSchedule schedule = ClassSchedule::kRandom;
  // Per-subject propensity u ~ U(0, 1); day class ~ Binomial(3, u);
  // gpa = 1 + 2.5 * mean(day class) / 3 + N(0, gpa_noise).
  GradeCohort grade;

  void validate() const;
};

std::vector<std::string> builtin_scenarios();
ScenarioSpec builtin_scenario(std::string_view name);

// {"scenario": <builtin name>, ...overrides} or a full "templates" array.
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct SynthDataset {
  RawDataset data;
  std::vector<std::vector<int>> day_class;  // subject -> day -> generating class
};

SynthDataset generate(const ScenarioSpec& spec);

// Class whose template best explains the cycle streams of the day, or nullopt
// when the best match is tied or explains less than `min_match` of the slots.
std::optional<int> oracle_label(const DayWindow& day, const ScenarioSpec& spec, double min_match = 0.6);

}  // namespace lgbg
