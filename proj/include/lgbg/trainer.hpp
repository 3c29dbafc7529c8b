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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgbg/dataset.hpp"
#include "lgbg/metrics.hpp"
#include "lgbg/model.hpp"
#include "lgbg/param_set.hpp"

namespace lgbg {

struct TrainConfig {
  ModelConfig model;
  double lambda = 0.1;
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  std::size_t patience = 8;
  double min_delta = 1e-4;  // validation improvement that resets patience
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  std::size_t span = 3;
  std::size_t splits = 10;
  bool parallel = true;

  void validate() const;
};

struct BatchResult {
  double loss = 0.0;            // L_c + lambda * L_n
  double classification = 0.0;  // L_c
  double node_variance = 0.0;    // L_n
  std::size_t clamped = 0;       // probabilities clamped in the cross-entropy
  Gradients grads;
};

// Loss and parameter gradients of one batch. Each sample is differentiated on
// its own tape (in parallel when `parallel`); the batch-level node variance
// term is resolved between the forward and backward phases, and per-sample
// gradients are summed in batch order, so the result does not depend on the
// thread count.
BatchResult batch_gradient(const Model& model, const PreparedDataset& data,
                           std::span<const std::size_t> batch, double lambda, bool parallel = true);

// Serial reference: the whole batch on one tape, the node variance loss built
// from the stacked states with tape operations.
BatchResult batch_gradient_reference(const Model& model, const PreparedDataset& data,
                                     std::span<const std::size_t> batch, double lambda);

// Loss only (no gradients).
double batch_loss(const Model& model, const PreparedDataset& data, std::span<const std::size_t> batch,
                  double lambda);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

// Adam on shuffled mini-batches. When `validation` is non-empty, keeps the
// parameters with the lowest validation cross-entropy and stops after
// `patience` epochs without an improvement larger than `min_delta`.
TrainResult train(const PreparedDataset& data, std::span<const std::size_t> training,
                  std::span<const std::size_t> validation, const TrainConfig& config);

struct SplitTask {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Shuffled partition of [0, n) into k folds; task i tests fold i.
std::vector<SplitTask> split_protocol(std::size_t n, std::size_t k, std::uint64_t seed);

// Deterministic hold-out of `fraction` of `indices` for early stopping.
void hold_out(std::span<const std::size_t> indices, double fraction, std::uint64_t seed,
              std::vector<std::size_t>& train, std::vector<std::size_t>& validation);

std::vector<int> predict_labels(const Model& model, const PreparedDataset& data,
                                std::span<const std::size_t> indices, bool parallel = true);
EvalReport evaluate(const Model& model, const PreparedDataset& data, std::span<const std::size_t> indices,
                    bool parallel = true);

struct ProtocolResult {
  std::vector<EvalReport> tasks;
  EvalReport mean;
  std::vector<std::vector<EpochRecord>> histories;
};

ProtocolResult run_split_protocol(const PreparedDataset& data, const TrainConfig& config);

// KNN over the concatenated per-day 108-d behavior features of each sample.
ProtocolResult run_knn_baseline(const PreparedDataset& data, std::size_t splits, std::uint64_t seed,
                                std::size_t neighbors = 5);

std::string history_to_csv(std::span<const std::vector<EpochRecord>> histories);

}  // namespace lgbg
