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
#include "lgbg/error.hpp"
#include "lgbg/synthgen.hpp"
#include "lgbg/trainer.hpp"

using namespace lgbg;

namespace {

std::string log_text(const EventLog& log) {
  std::ostringstream out;
  write_event_log(out, log);
  return out.str();
}

ScenarioSpec small_spec(std::string_view name, std::size_t subjects, std::size_t days, double noise) {
  auto spec = builtin_scenario(name);
  spec.subjects = subjects;
  spec.days = days;
  spec.noise = noise;
  return spec;
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("four zero-noise days, one per class, have distinct features") {
    for (const auto* name : {"presence", "combined"}) {
      auto spec = small_spec(name, 1, 4, 0.0);
      spec.schedule = ClassSchedule::kCycle;
      const auto out = generate(spec);
      REQUIRE(out.data.subjects.size() == 1);
      const auto& subject = out.data.subjects[0];
      CHECK(out.day_class[0] == std::vector<int>{0, 1, 2, 3});
      const auto labels = subject.labels();
      REQUIRE(labels.size() == 4);
      std::vector<BehaviorFeature> features;
      for (std::int64_t d = 0; d < 4; ++d) {
        CHECK(labels.at(d) == d);
        features.push_back(behavior_feature(slice_day(subject.log, d, out.data.day_origin), out.data.vocab));
      }
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) CHECK(features[a] != features[b]);
    }
  }

  TEST_CASE("same seed gives byte-identical logs, another seed does not") {
    const auto spec = small_spec("combined", 3, 5, 0.2);
    const auto a = generate(spec), b = generate(spec);
    auto other = spec;
    other.seed += 1;
    const auto c = generate(other);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(log_text(a.data.subjects[s].log) == log_text(b.data.subjects[s].log));
      CHECK(a.data.subjects[s].pam == b.data.subjects[s].pam);
    }
    CHECK(log_text(a.data.subjects[0].log) != log_text(c.data.subjects[0].log));
  }

  TEST_CASE("generated logs pass parsing and round trip") {
    for (const auto& name : builtin_scenarios()) {
      const auto out = generate(small_spec(name, 2, 3, 0.3));
      for (const auto& subject : out.data.subjects) {
        const auto text = log_text(subject.log);
        std::istringstream in(text);
        const auto parsed = parse_event_log(in, out.data.vocab);
        CHECK(parsed.streams == subject.log.streams);
        CHECK(parsed.unlisted_locations == 0);
        CHECK(subject.log.event_count() == 3 * 12 * kStreamCount);
      }
    }
  }

  TEST_CASE("oracle recovers every zero-noise day of every scenario") {
    for (const auto& name : builtin_scenarios()) {
      INFO(name);
      const auto spec = small_spec(name, 4, 12, 0.0);
      const auto out = generate(spec);
      std::size_t correct = 0, total = 0;
      for (std::size_t s = 0; s < out.data.subjects.size(); ++s)
        for (std::size_t d = 0; d < spec.days; ++d) {
          const auto day = slice_day(out.data.subjects[s].log, static_cast<std::int64_t>(d), out.data.day_origin);
          const auto label = oracle_label(day, spec);
          correct += label && *label == out.day_class[s][d];
          ++total;
        }
      CHECK(correct == total);
    }
  }

  TEST_CASE("oracle label ignores event order and abstains on empty days") {
    const auto spec = small_spec("combined", 1, 6, 0.1);
    const auto out = generate(spec);
    std::mt19937_64 rng(1);
    for (std::int64_t d = 0; d < 6; ++d) {
      auto day = slice_day(out.data.subjects[0].log, d, out.data.day_origin);
      const auto before = oracle_label(day, spec);
      for (auto& stream : day.streams) std::shuffle(stream.begin(), stream.end(), rng);
      CHECK(oracle_label(day, spec) == before);
    }
    CHECK_FALSE(oracle_label(DayWindow{}, spec).has_value());
  }

  TEST_CASE("heavy noise makes the oracle abstain or miss more often") {
    const auto spec = small_spec("combined", 4, 12, 0.9);
    const auto out = generate(spec);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t d = 0; d < 12; ++d) {
        const auto label = oracle_label(slice_day(out.data.subjects[s].log, static_cast<std::int64_t>(d), out.data.day_origin), spec);
        correct += label && *label == out.day_class[s][d];
      }
    CHECK(correct < 48);
  }

  TEST_CASE("invalid templates are validation errors") {
    auto bad = builtin_scenario("presence");
    bad.templates[1][static_cast<std::size_t>(StreamType::kLocation)].concepts = {"spaceship"};
    try {
      generate(bad);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
    }
    auto same = builtin_scenario("presence");
    same.templates[2] = same.templates[1];
    CHECK_THROWS_AS(same.validate(), Error);
    auto slots = builtin_scenario("presence");
    slots.slots_per_day = 7;
    CHECK_THROWS_AS(slots.validate(), Error);
    CHECK_THROWS_AS(builtin_scenario("nonexistent"), Error);
  }

  TEST_CASE("scenario json round trip and overrides") {
    auto spec = builtin_scenario("transition");
    spec.noise = 0.25;
    spec.grade.enabled = true;
    const auto j = scenario_to_json(spec);
    CHECK(scenario_to_json(scenario_from_json(j)) == j);
    const auto o = scenario_from_json(nlohmann::json{{"scenario", "presence"}, {"days", 9}, {"seed", 3}});
    CHECK(o.days == 9);
    CHECK(o.seed == 3);
    CHECK(scenario_to_json(o)["templates"] == scenario_to_json(builtin_scenario("presence"))["templates"]);
    try {
      scenario_from_json(nlohmann::json{{"scenario", "presence"}, {"days", "many"}});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.is_input_error());
    }
  }

  TEST_CASE("label density thins the labels") {
    auto spec = small_spec("combined", 3, 20, 0.0);
    spec.label_density = 0.5;
    const auto out = generate(spec);
    std::size_t labeled = 0;
    for (const auto& s : out.data.subjects) labeled += s.pam.size();
    CHECK(labeled > 15);
    CHECK(labeled < 45);
  }

  TEST_CASE("grade cohort ties gpa to the subject's day classes") {
    auto spec = small_spec("cooccurrence", 30, 20, 0.0);
    spec.grade.enabled = true;
    spec.grade.gpa_noise = 0.0;
    const auto out = generate(spec);
    for (std::size_t s = 0; s < 30; ++s) {
      REQUIRE(out.data.subjects[s].gpa.has_value());
      double mean = 0;
      for (int c : out.day_class[s]) mean += c;
      mean /= 20.0;
      CHECK(*out.data.subjects[s].gpa == doctest::Approx(1.0 + 2.5 * mean / 3.0).epsilon(1e-12));
    }
  }

  TEST_CASE("labels independent of content leave a trained model near chance") {
    auto spec = small_spec("combined", 20, 16, 1.0);
    spec.slots_per_day = 6;
    const auto out = generate(spec);
    TrainConfig c;
    c.model.gnn.node_dim = 8;
    c.model.gnn.edge_dim = 6;
    c.model.gnn.rep_dim = 6;
    c.model.gnn.layers = 1;
    c.model.attn_dim = 4;
    c.model.max_positions = 4;
    c.span = 2;
    c.splits = 3;
    c.epochs = 5;
    c.seed = 1;
    const auto table = EmbeddingTable::fallback(out.data.vocab, 8, 0);
    const auto data = prepare_dataset(out.data, table, c.model.gnn, c.span);
    REQUIRE(data.samples.size() >= 250);
    const auto r = run_split_protocol(data, c);
    CHECK(r.mean.accuracy >= 0.25 - 0.08);
    CHECK(r.mean.accuracy <= 0.25 + 0.08);
  }
}
