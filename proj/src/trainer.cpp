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

#include "lgbg/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <numeric>
#include <random>

#include "lgbg/adam.hpp"
#include "lgbg/error.hpp"
#include "lgbg/knn.hpp"
#include "lgbg/losses.hpp"

namespace lgbg {

namespace {

// Runs body(i) for i in [0, n), in parallel when asked. The first exception
// thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void for_each_index(std::size_t n, bool parallel, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lgbg_for_each_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string describe_batch(const PreparedDataset& data, std::span<const std::size_t> batch) {
  std::string out;
  for (auto i : batch) {
    const auto& s = data.samples.at(i);
    if (!out.empty()) out += ", ";
    out += data.subject_ids.at(s.subject) + ":" + std::to_string(s.anchor_day);
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SampleWork {
  Tape tape{true};
  SampleForward fwd;
  Var ce;
  std::size_t clamped = 0;
};

}  // namespace

void TrainConfig::validate() const {
  if (lambda < 0.0) fail(ErrorKind::kValidation, "lambda must be >= 0");
  if (!(learning_rate > 0.0)) fail(ErrorKind::kValidation, "learning rate must be positive");
  if (splits < 2) fail(ErrorKind::kValidation, "split count must be >= 2");
  if (span < 1) fail(ErrorKind::kValidation, "span must be >= 1");
  if (batch_size < 1) fail(ErrorKind::kValidation, "batch size must be >= 1");
  if (min_delta < 0.0) fail(ErrorKind::kValidation, "min_delta must be >= 0");
  if (val_fraction < 0.0 || val_fraction >= 1.0) fail(ErrorKind::kValidation, "validation fraction must be in [0, 1)");
  const auto& g = model.gnn;
  if (!g.node_dim || !g.edge_dim || !g.rep_dim) fail(ErrorKind::kValidation, "model dimensions must be positive");
  if (model.max_positions < span) fail(ErrorKind::kValidation, "position table shorter than the span");
}

BatchResult batch_gradient(const Model& model, const PreparedDataset& data,
                           std::span<const std::size_t> batch, double lambda, bool parallel) {
  if (batch.empty()) fail(ErrorKind::kUsage, "batch_gradient: empty batch");
  const std::size_t n = batch.size();
  std::vector<std::unique_ptr<SampleWork>> work(n);

  for_each_index(n, parallel, [&](std::size_t i) {
    const auto& sample = data.samples.at(batch[i]);
    auto w = std::make_unique<SampleWork>();
    const auto days = data.days(sample);
    w->fwd = model.forward(w->tape, days);
    w->ce = w->tape.nll(w->fwd.probs, static_cast<std::size_t>(sample.label), kProbabilityFloor, &w->clamped);
    work[i] = std::move(w);
  });

  // Batch statistics of the stacked node states, accumulated in batch order.
  const std::size_t d = model.config().gnn.node_dim;
  std::size_t rows = 0;
  std::vector<double> mean(d, 0.0);
  for (const auto& w : work) {
    if (!w->fwd.node_states.valid()) continue;
    const Tensor& e = w->tape.value(w->fwd.node_states);
    for (std::size_t r = 0; r < e.rows(); ++r)
      for (std::size_t c = 0; c < d; ++c) mean[c] += e.at(r, c);
    rows += e.rows();
  }
  double mean_var = 0.0;
  if (rows > 0) {
    for (auto& m : mean) m /= static_cast<double>(rows);
    for (const auto& w : work) {
      if (!w->fwd.node_states.valid()) continue;
      const Tensor& e = w->tape.value(w->fwd.node_states);
      for (std::size_t r = 0; r < e.rows(); ++r)
        for (std::size_t c = 0; c < d; ++c) mean_var += (e.at(r, c) - mean[c]) * (e.at(r, c) - mean[c]);
    }
    mean_var /= static_cast<double>(rows * d);
  }
  const double s = sigmoid(mean_var);
  // dL/dE_rc = lambda * -s(1-s) * 2 / (rows d) * (E_rc - mean_c)
  const double coeff = rows ? lambda * -s * (1.0 - s) * 2.0 / static_cast<double>(rows * d) : 0.0;

  BatchResult result;
  std::vector<Gradients> grads(n);
  for_each_index(n, parallel, [&](std::size_t i) {
    SampleWork& w = *work[i];
    std::vector<std::pair<Var, Tensor>> seeds;
    seeds.emplace_back(w.ce, Tensor::scalar(1.0 / static_cast<double>(n)));
    if (w.fwd.node_states.valid() && coeff != 0.0 && w.tape.requires_grad(w.fwd.node_states)) {
      Tensor adj = w.tape.value(w.fwd.node_states);
      for (std::size_t r = 0; r < adj.rows(); ++r)
        for (std::size_t c = 0; c < d; ++c) adj.at(r, c) = coeff * (adj.at(r, c) - mean[c]);
      seeds.emplace_back(w.fwd.node_states, std::move(adj));
    }
    w.tape.backward(seeds);
    grads[i] = w.tape.param_grads(model.params());
  });

  result.grads = Gradients(model.params());
  double ce_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.grads.accumulate(grads[i]);
    ce_total += work[i]->tape.value(work[i]->ce)[0];
    result.clamped += work[i]->clamped;
  }
  result.classification = ce_total / static_cast<double>(n);
  result.node_variance = -s;
  result.loss = total_loss(result.classification, result.node_variance, lambda);
  return result;
}

BatchResult batch_gradient_reference(const Model& model, const PreparedDataset& data,
                                     std::span<const std::size_t> batch, double lambda) {
  if (batch.empty()) fail(ErrorKind::kUsage, "batch_gradient_reference: empty batch");
  Tape tape(true);
  BatchResult result;
  std::vector<Var> ce_terms, states;
  for (auto idx : batch) {
    const auto& sample = data.samples.at(idx);
    const auto days = data.days(sample);
    const auto fwd = model.forward(tape, days);
    ce_terms.push_back(tape.nll(fwd.probs, static_cast<std::size_t>(sample.label), kProbabilityFloor,
                                &result.clamped));
    if (fwd.node_states.valid()) states.push_back(fwd.node_states);
  }
  Var lc = tape.scale(tape.sum(tape.concat(ce_terms)), 1.0 / static_cast<double>(batch.size()));
  Var ln = states.empty() ? tape.constant(Tensor::scalar(-0.5))
                          : node_variance_loss(tape, states.size() == 1 ? states.front() : tape.concat_rows(states));
  Var total = tape.add(lc, tape.scale(ln, lambda));
  tape.backward(total);
  result.grads = tape.param_grads(model.params());
  result.classification = tape.value(lc)[0];
  result.node_variance = tape.value(ln)[0];
  result.loss = tape.value(total)[0];
  return result;
}

double batch_loss(const Model& model, const PreparedDataset& data, std::span<const std::size_t> batch,
                  double lambda) {
  Tape tape(false);
  double ce = 0.0;
  std::vector<Var> states;
  for (auto idx : batch) {
    const auto& sample = data.samples.at(idx);
    const auto days = data.days(sample);
    const auto fwd = model.forward(tape, days);
    ce += tape.value(tape.nll(fwd.probs, static_cast<std::size_t>(sample.label)))[0];
    if (fwd.node_states.valid()) states.push_back(fwd.node_states);
  }
  double ln = -0.5;
  if (!states.empty())
    ln = node_variance_loss(tape.value(states.size() == 1 ? states.front() : tape.concat_rows(states)));
  return total_loss(ce / static_cast<double>(batch.size()), ln, lambda);
}

std::vector<int> predict_labels(const Model& model, const PreparedDataset& data,
                                std::span<const std::size_t> indices, bool parallel) {
  std::vector<int> out(indices.size());
  for_each_index(indices.size(), parallel, [&](std::size_t i) {
    const auto days = data.days(data.samples.at(indices[i]));
    const auto p = model.predict(days);
    out[i] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  });
  return out;
}

EvalReport evaluate(const Model& model, const PreparedDataset& data, std::span<const std::size_t> indices,
                    bool parallel) {
  const auto predicted = predict_labels(model, data, indices, parallel);
  std::vector<int> truth;
  truth.reserve(indices.size());
  for (auto i : indices) truth.push_back(data.samples.at(i).label);
  return evaluate_predictions(truth, predicted, kClassCount);
}

namespace {

double mean_cross_entropy(const Model& model, const PreparedDataset& data, std::span<const std::size_t> indices,
                          bool parallel, double* accuracy) {
  std::vector<double> ce(indices.size());
  std::vector<int> hit(indices.size());
  for_each_index(indices.size(), parallel, [&](std::size_t i) {
    const auto& s = data.samples.at(indices[i]);
    const auto days = data.days(s);
    const auto p = model.predict(days);
    ce[i] = cross_entropy(p, static_cast<std::size_t>(s.label));
    hit[i] = (std::max_element(p.begin(), p.end()) - p.begin()) == s.label;
  });
  if (accuracy)
    *accuracy = indices.empty() ? 0.0 : static_cast<double>(std::accumulate(hit.begin(), hit.end(), 0)) /
                                            static_cast<double>(indices.size());
  return indices.empty() ? 0.0 : std::accumulate(ce.begin(), ce.end(), 0.0) / static_cast<double>(indices.size());
}

}  // namespace

TrainResult train(const PreparedDataset& data, std::span<const std::size_t> training,
                  std::span<const std::size_t> validation, const TrainConfig& config) {
  config.validate();
  if (training.empty()) fail(ErrorKind::kInsufficientData, "train: no training samples");
  TrainResult result{Model::create(config.model, config.seed), {}, 0, false};
  Model& model = result.model;
  Adam adam(model.params(), AdamOptions{config.learning_rate});
  std::mt19937_64 rng(config.seed ^ 0x5DEECE66DULL);

  std::vector<std::size_t> order(training.begin(), training.end());
  ParamSet best = model.params();
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::span<const std::size_t> batch(order.data() + b, std::min(config.batch_size, order.size() - b));
      BatchResult br;
      try {
        br = batch_gradient(model, data, batch, config.lambda, config.parallel);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumeric) throw;
        fail(ErrorKind::kNumeric, std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                      ", batch samples " + describe_batch(data, batch) + ")");
      }
      if (!std::isfinite(br.loss))
        fail(ErrorKind::kNumeric, "non-finite loss at epoch " + std::to_string(epoch) + ", batch samples " +
                                      describe_batch(data, batch));
      adam.step(model.params(), br.grads);
      loss_sum += br.loss;
      ++batches;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    if (!validation.empty()) {
      rec.val_loss = mean_cross_entropy(model, data, validation, config.parallel, &rec.val_accuracy);
      const bool improved = rec.val_loss < best_val - config.min_delta;
      if (rec.val_loss < best_val) {
        best_val = rec.val_loss;
        best = model.params();
        result.best_epoch = epoch;
      }
      if (improved) {
        since_best = 0;
      } else if (++since_best >= config.patience) {
        result.history.push_back(rec);
        result.stopped_early = true;
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.history.push_back(rec);
  }
  if (!validation.empty()) model.params() = std::move(best);
  return result;
}

std::vector<SplitTask> split_protocol(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::kUsage, "split count must be >= 2");
  if (k > n) fail(ErrorKind::kInsufficientData, "split count " + std::to_string(k) + " exceeds sample count " +
                                                    std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<SplitTask> tasks(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
    for (std::size_t i = 0; i < n; ++i) {
      auto& dst = (i >= lo && i < hi) ? tasks[f].test : tasks[f].train;
      dst.push_back(perm[i]);
    }
  }
  return tasks;
}

void hold_out(std::span<const std::size_t> indices, double fraction, std::uint64_t seed,
              std::vector<std::size_t>& train, std::vector<std::size_t>& validation) {
  std::vector<std::size_t> shuffled(indices.begin(), indices.end());
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto n_val = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(shuffled.size())));
  if (n_val >= shuffled.size()) n_val = 0;
  validation.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_val));
  train.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_val), shuffled.end());
}

ProtocolResult run_split_protocol(const PreparedDataset& data, const TrainConfig& config) {
  config.validate();
  const auto tasks = split_protocol(data.samples.size(), config.splits, config.seed);
  ProtocolResult out;
  out.tasks.resize(tasks.size());
  out.histories.resize(tasks.size());
  TrainConfig inner = config;
  inner.parallel = false;  // tasks are the unit of parallelism here
  for_each_index(tasks.size(), config.parallel, [&](std::size_t t) {
    std::vector<std::size_t> train_idx, val_idx;
    hold_out(tasks[t].train, config.val_fraction, config.seed + 1000003ULL * (t + 1), train_idx, val_idx);
    TrainConfig task_config = inner;
    task_config.seed = config.seed + t;
    auto trained = train(data, train_idx, val_idx, task_config);
    out.tasks[t] = evaluate(trained.model, data, tasks[t].test, false);
    out.histories[t] = std::move(trained.history);
  });
  out.mean = average_reports(out.tasks);
  return out;
}

ProtocolResult run_knn_baseline(const PreparedDataset& data, std::size_t splits, std::uint64_t seed,
                                std::size_t neighbors) {
  FeatureRows features;
  std::vector<int> labels;
  for (const auto& s : data.samples) {
    std::vector<double> row;
    for (auto g : s.graphs) row.insert(row.end(), data.features[g].begin(), data.features[g].end());
    features.push_back(std::move(row));
    labels.push_back(s.label);
  }
  const auto tasks = split_protocol(data.samples.size(), splits, seed);
  ProtocolResult out;
  for (const auto& task : tasks) {
    FeatureRows train_x;
    std::vector<int> train_y, truth, predicted;
    for (auto i : task.train) {
      train_x.push_back(features[i]);
      train_y.push_back(labels[i]);
    }
    for (auto i : task.test) {
      truth.push_back(labels[i]);
      predicted.push_back(knn_classify(train_x, train_y, features[i], neighbors));
    }
    out.tasks.push_back(evaluate_predictions(truth, predicted, kClassCount));
  }
  out.mean = average_reports(out.tasks);
  return out;
}

std::string history_to_csv(std::span<const std::vector<EpochRecord>> histories) {
  std::string out = "task,epoch,train_loss,val_loss,val_accuracy\n";
  char buf[160];
  for (std::size_t t = 0; t < histories.size(); ++t)
    for (const auto& r : histories[t]) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.8f,%.8f,%.6f\n", t, r.epoch, r.train_loss, r.val_loss,
                    r.val_accuracy);
      out += buf;
    }
  return out;
}

}  // namespace lgbg
