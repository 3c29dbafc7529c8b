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

#include "lgbg/model_check.hpp"

#include "lgbg/synthgen.hpp"
#include "lgbg/trainer.hpp"

namespace lgbg {

ToyBatch make_toy_batch(std::uint64_t seed) {
  ToyBatch toy;
  toy.config.gnn.node_dim = 6;
  toy.config.gnn.edge_dim = 4;
  toy.config.gnn.rep_dim = 5;
  toy.config.gnn.layers = 2;
  toy.config.attn_dim = 3;
  toy.config.max_positions = 4;

  ScenarioSpec spec = builtin_scenario("combined");
  spec.subjects = 1;
  spec.days = 4;
  spec.slots_per_day = 6;
  spec.noise = 0.3;
  spec.seed = seed;
  spec.schedule = ClassSchedule::kCycle;
  toy.raw = generate(spec).data;
  // Blank day 1 so both samples carry an empty day.
  auto& log = toy.raw.subjects.front().log;
  const std::int64_t lo = spec.day_origin + kSecondsPerDay, hi = lo + kSecondsPerDay;
  for (auto& stream : log.streams)
    std::erase_if(stream, [&](const ConceptEvent& e) { return e.start >= lo && e.start < hi; });

  const auto table = EmbeddingTable::fallback(toy.raw.vocab, toy.config.gnn.node_dim, seed);
  toy.data = prepare_dataset(toy.raw, table, toy.config.gnn, 3);
  for (std::size_t i = 0; i < toy.data.samples.size(); ++i) toy.batch.push_back(i);
  return toy;
}

GradCheckReport model_gradient_check(std::uint64_t seed, const ModelCheckOptions& options) {
  ToyBatch toy = make_toy_batch(seed);
  Model model = Model::create(toy.config, seed);
  BatchResult br = batch_gradient(model, toy.data, toy.batch, options.lambda);
  if (options.corrupt_gradient) br.grads[0].data()[0] += 0.05;
  ParamSet params = model.params();
  const auto loss = [&](const ParamSet& p) {
    return batch_loss(Model::from_params(toy.config, p), toy.data, toy.batch, options.lambda);
  };
  GradCheckOptions gc;
  gc.eps = options.eps;
  gc.seed = seed;
  return finite_diff_check(loss, params, br.grads, gc);
}

}  // namespace lgbg
