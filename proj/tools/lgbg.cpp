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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgbg/concept_stream.hpp"
#include "lgbg/dataset.hpp"
#include "lgbg/error.hpp"
#include "lgbg/grade.hpp"
#include "lgbg/graph_builder.hpp"
#include "lgbg/model.hpp"
#include "lgbg/model_check.hpp"
#include "lgbg/run_config.hpp"
#include "lgbg/synthgen.hpp"
#include "lgbg/trainer.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) lgbg::fail(lgbg::ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) lgbg::fail(lgbg::ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("LGBG_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end) lgbg::fail(lgbg::ErrorKind::kUsage, std::string("LGBG_SEED is not an unsigned integer: ") + s);
  return v;
}

// Flag overrides shared by the commands that build a RunConfig.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<std::size_t> layers;
  std::optional<std::size_t> rep_dim;
  std::optional<std::size_t> splits;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> span;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file of dotted config keys");
    cmd->add_option("--seed", seed, "train.seed");
    cmd->add_option("--lambda", lambda, "train.lambda");
    cmd->add_option("--layers", layers, "model.layers");
    cmd->add_option("--dp", rep_dim, "model.rep_dim");
    cmd->add_option("--splits", splits, "train.splits");
    cmd->add_option("--epochs", epochs, "train.epochs");
    cmd->add_option("--span", span, "train.span");
    cmd->add_option("--set", sets, "key=value override (value parsed as JSON)");
  }

  lgbg::RunConfig resolve() const {
    lgbg::RunConfig rc;
    if (auto s = env_seed()) rc.set("train.seed", *s);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) lgbg::fail(lgbg::ErrorKind::kIo, "cannot open config file " + config_path);
      ojson j = ojson::parse(in, nullptr, false);
      if (j.is_discarded()) lgbg::fail(lgbg::ErrorKind::kParse, "config file " + config_path + " is not valid JSON");
      rc.merge(j);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) lgbg::fail(lgbg::ErrorKind::kUsage, "--set expects key=value, got " + kv);
      ojson v = ojson::parse(kv.substr(eq + 1), nullptr, false);
      if (v.is_discarded()) v = kv.substr(eq + 1);
      rc.set(kv.substr(0, eq), v);
    }
    if (seed) rc.set("train.seed", *seed);
    if (lambda) rc.set("train.lambda", *lambda);
    if (layers) rc.set("model.layers", *layers);
    if (rep_dim) rc.set("model.rep_dim", *rep_dim);
    if (splits) rc.set("train.splits", *splits);
    if (epochs) rc.set("train.epochs", *epochs);
    if (span) rc.set("train.span", *span);
    return rc;
  }
};

lgbg::EmbeddingTable make_table(const lgbg::RunConfig& rc, const lgbg::Vocabulary& vocab) {
  const auto dim = rc.get<std::size_t>("model.node_dim");
  const auto seed = rc.get<std::uint64_t>("embedding.seed");
  const auto path = rc.get<std::string>("embedding.path");
  if (path.empty()) return lgbg::EmbeddingTable::fallback(vocab, dim, seed);
  return lgbg::EmbeddingTable::from_file(path, vocab, dim, true, seed);
}

// Dataset prepared with the vocabulary and embeddings stored in a checkpoint.
lgbg::PreparedDataset prepare_for_checkpoint(const lgbg::Checkpoint& ck, const fs::path& data_dir) {
  const auto raw = lgbg::load_dataset(data_dir);
  if (raw.vocab.hash() != ck.vocab.hash())
    lgbg::fail(lgbg::ErrorKind::kVocabulary, "vocabulary of " + data_dir.string() + " does not match the checkpoint");
  const auto span = ck.run_config.value("train.span", std::size_t{3});
  return lgbg::prepare_dataset(raw, ck.table, ck.model.config().gnn, span);
}

ojson report_json(const lgbg::ProtocolResult& r) {
  return ojson(lgbg::reports_to_json(r.tasks, r.mean));
}

int cmd_build_graph(const std::string& log_path, const std::string& vocab_path, const std::string& labels_path,
                    const fs::path& out, std::optional<std::int64_t> day_origin, std::size_t span,
                    const ConfigFlags& flags) {
  if (span == 0) lgbg::fail(lgbg::ErrorKind::kValidation, "--span must be positive");
  const auto rc = flags.resolve();
  const auto vocab = lgbg::Vocabulary::load(vocab_path);
  const auto log = lgbg::parse_event_log(fs::path(log_path), vocab);
  const auto table = make_table(rc, vocab);
  if (log.unlisted_locations)
    std::cerr << "warning: " << log.unlisted_locations << " unlisted locations mapped to " << lgbg::kOtherLocation
              << "\n";
  const std::int64_t origin = day_origin ? *day_origin : lgbg::default_day_origin(log);

  std::map<std::int64_t, int> pam;
  if (!labels_path.empty()) {
    std::ifstream in(labels_path);
    if (!in) lgbg::fail(lgbg::ErrorKind::kIo, "cannot open labels file " + labels_path);
    std::string line;
    std::getline(in, line);
    if (line != "day,pam") lgbg::fail(lgbg::ErrorKind::kParse, labels_path + ": expected header day,pam");
    for (std::size_t n = 2; std::getline(in, line); ++n) {
      if (line.empty()) continue;
      long long day = 0;
      int score = 0;
      char extra = 0;
      if (std::sscanf(line.c_str(), "%lld,%d%c", &day, &score, &extra) != 2)
        lgbg::fail(lgbg::ErrorKind::kParse, labels_path + ":" + std::to_string(n) + ": malformed row");
      pam[day] = score;
    }
  }

  const std::int64_t days = log.event_count() ? lgbg::day_count(log, origin) : 0;
  ojson j;
  j["day_origin"] = origin;
  j["span"] = span;
  j["config"] = rc.values();
  j["graphs"] = ojson::array();
  for (std::int64_t d = 0; d < days; ++d) {
    const auto g = lgbg::build_local_graph(lgbg::slice_day(log, d, origin), d, vocab, table);
    j["graphs"].push_back(ojson::parse(lgbg::graph_to_json(g, -1)));
  }
  j["samples"] = ojson::array();
  for (std::int64_t d = static_cast<std::int64_t>(span) - 1; d < days; ++d) {
    ojson s;
    if (!pam.empty() && !pam.count(d)) continue;
    s["anchor_day"] = d;
    s["days"] = ojson::array();
    for (std::int64_t k = d + 1 - static_cast<std::int64_t>(span); k <= d; ++k) s["days"].push_back(k);
    s["label"] = pam.count(d) ? ojson(lgbg::quantize_pam(pam.at(d))) : ojson(nullptr);
    j["samples"].push_back(s);
  }
  if (j["samples"].empty()) std::cerr << "warning: no samples (" << days << " days, span " << span << ")\n";
  ensure_dir(out);
  write_text(out / "graphs.json", j.dump(2) + "\n");
  return kExitOk;
}

int cmd_train(const fs::path& data_dir, const fs::path& out, bool baseline, const ConfigFlags& flags) {
  const auto rc = flags.resolve();
  const auto config = rc.train_config();
  const auto raw = lgbg::load_dataset(data_dir);
  const auto table = make_table(rc, raw.vocab);
  const auto data = lgbg::prepare_dataset(raw, table, config.model.gnn, config.span);
  if (data.samples.empty()) lgbg::fail(lgbg::ErrorKind::kInsufficientData, "no labeled samples in " + data_dir.string());

  const auto result = lgbg::run_split_protocol(data, config);
  ensure_dir(out);
  write_text(out / "config.json", rc.dump() + "\n");
  write_text(out / "metrics.csv", lgbg::reports_to_csv(result.tasks, result.mean));
  ojson metrics = report_json(result);
  metrics["config"] = rc.values();
  write_text(out / "metrics.json", metrics.dump(2) + "\n");
  write_text(out / "history.csv", lgbg::history_to_csv(result.histories));
  if (baseline) {
    const auto knn = lgbg::run_knn_baseline(data, config.splits, config.seed);
    write_text(out / "baseline_metrics.csv", lgbg::reports_to_csv(knn.tasks, knn.mean));
  }

  std::vector<std::size_t> all(data.samples.size()), train_idx, val_idx;
  std::iota(all.begin(), all.end(), std::size_t{0});
  lgbg::hold_out(all, config.val_fraction, config.seed, train_idx, val_idx);
  auto final_model = lgbg::train(data, train_idx, val_idx, config);
  lgbg::save_checkpoint(out / "model.json",
                        lgbg::Checkpoint{std::move(final_model.model), raw.vocab, table, ojson(rc.values())});
  std::printf("accuracy %.4f  precision %.4f  recall %.4f  f1 %.4f  (%zu samples, %zu tasks)\n",
              result.mean.accuracy, result.mean.precision, result.mean.recall, result.mean.f1, data.samples.size(),
              result.tasks.size());
  return kExitOk;
}

int cmd_eval(const fs::path& checkpoint, const fs::path& data_dir, std::size_t splits, const fs::path& out) {
  const auto ck = lgbg::load_checkpoint(checkpoint);
  const auto data = prepare_for_checkpoint(ck, data_dir);
  const auto seed = ck.run_config.value("train.seed", std::uint64_t{0});
  const auto tasks = lgbg::split_protocol(data.samples.size(), splits, seed);
  lgbg::ProtocolResult result;
  for (const auto& t : tasks) result.tasks.push_back(lgbg::evaluate(ck.model, data, t.test));
  result.mean = lgbg::average_reports(result.tasks);
  ensure_dir(out);
  write_text(out / "eval.csv", lgbg::reports_to_csv(result.tasks, result.mean));
  ojson j = report_json(result);
  j["config"] = ck.run_config;
  write_text(out / "eval.json", j.dump(2) + "\n");
  std::printf("accuracy %.4f  f1 %.4f  (%zu samples)\n", result.mean.accuracy, result.mean.f1, data.samples.size());
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& scenario, const fs::path& out,
              std::optional<std::uint64_t> seed) {
  lgbg::ScenarioSpec spec = spec_path.empty() ? lgbg::builtin_scenario(scenario) : lgbg::load_scenario(spec_path);
  if (auto s = env_seed(); s && spec_path.empty()) spec.seed = *s;
  if (seed) spec.seed = *seed;
  const auto synth = lgbg::generate(spec);
  lgbg::save_dataset(out, synth.data);
  write_text(out / "scenario.json", ojson(lgbg::scenario_to_json(spec)).dump(2) + "\n");
  std::string classes = "subject,day,class\n";
  for (std::size_t s = 0; s < synth.day_class.size(); ++s)
    for (std::size_t d = 0; d < synth.day_class[s].size(); ++d)
      classes += synth.data.subjects[s].id + "," + std::to_string(d) + "," + std::to_string(synth.day_class[s][d]) + "\n";
  write_text(out / "day_classes.csv", classes);
  return kExitOk;
}

int cmd_inspect(const fs::path& checkpoint, const fs::path& data_dir, const std::string& sample_id,
                const fs::path& out) {
  const auto ck = lgbg::load_checkpoint(checkpoint);
  const auto data = prepare_for_checkpoint(ck, data_dir);
  std::size_t index = data.samples.size();
  const auto colon = sample_id.find(':');
  if (colon == std::string::npos) {
    char* end = nullptr;
    const auto v = std::strtoull(sample_id.c_str(), &end, 10);
    if (*end || sample_id.empty()) lgbg::fail(lgbg::ErrorKind::kUsage, "sample id must be N or subject:day");
    index = v;
  } else {
    const auto subject = sample_id.substr(0, colon);
    const auto day = std::strtoll(sample_id.c_str() + colon + 1, nullptr, 10);
    for (std::size_t i = 0; i < data.samples.size(); ++i)
      if (data.subject_ids[data.samples[i].subject] == subject && data.samples[i].anchor_day == day) index = i;
  }
  if (index >= data.samples.size())
    lgbg::fail(lgbg::ErrorKind::kRange, "no sample '" + sample_id + "' (" + std::to_string(data.samples.size()) +
                                            " samples)");
  const auto& sample = data.samples[index];
  lgbg::Tape tape(false);
  const auto days = data.days(sample);
  const auto fwd = ck.model.forward(tape, days);

  const auto vec = [&](lgbg::Var v) {
    return v.valid() ? ojson(tape.value(v).values()) : ojson::array();
  };
  ojson j;
  j["sample"] = index;
  j["subject"] = data.subject_ids[sample.subject];
  j["anchor_day"] = sample.anchor_day;
  j["label"] = sample.label;
  j["probabilities"] = vec(fwd.probs);
  j["days"] = ojson::array();
  for (std::size_t t = 0; t < fwd.locals.size(); ++t) {
    const auto& graph = data.graphs[sample.graphs[t]];
    ojson d;
    d["day"] = graph.day_index;
    d["empty"] = fwd.locals[t].empty;
    d["nodes"] = ojson::array();
    for (const auto& n : graph.nodes)
      d["nodes"].push_back({{"stream", lgbg::stream_name(n.stream)}, {"concept", n.concept_name}});
    d["node_attention"] = vec(fwd.locals[t].node_attention);
    d["edges"] = ojson::array();
    for (std::size_t e = 0; e < days[t]->edge_src.size(); ++e)
      d["edges"].push_back({days[t]->edge_src[e], days[t]->edge_dst[e]});
    d["edge_attention"] = vec(fwd.locals[t].edge_attention);
    j["days"].push_back(d);
  }
  const auto& gamma = tape.value(fwd.global.gamma);
  j["day_attention"] = ojson::array();
  for (std::size_t r = 0; r < gamma.rows(); ++r) {
    const auto row = gamma.row(r);
    j["day_attention"].push_back(std::vector<double>(row.begin(), row.end()));
  }
  ensure_dir(out);
  write_text(out / "attention.json", j.dump(2) + "\n");
  return kExitOk;
}

int cmd_grade(const fs::path& checkpoint, const fs::path& data_dir, std::size_t k, const fs::path& out) {
  const auto ck = lgbg::load_checkpoint(checkpoint);
  const auto raw = lgbg::load_dataset(data_dir);
  const auto data = prepare_for_checkpoint(ck, data_dir);
  std::vector<std::optional<double>> gpa;
  for (const auto& s : raw.subjects) gpa.push_back(s.gpa);
  const auto report = lgbg::grade_regression(ck.model, data, gpa, k);
  const auto reg = [](const lgbg::RegressionReport& r) {
    return ojson{{"mae", r.mae}, {"r2", r.r2}, {"pearson", r.pearson}, {"pearson_defined", r.pearson_defined}};
  };
  ojson j;
  j["k"] = k;
  j["subjects"] = report.subjects.size();
  j["graph"] = reg(report.graph);
  j["baseline"] = reg(report.baseline);
  j["config"] = ck.run_config;
  ensure_dir(out);
  write_text(out / "grade.json", j.dump(2) + "\n");
  std::printf("graph    MAE %.4f  R2 %.4f  Pearson %.4f\nbaseline MAE %.4f  R2 %.4f  Pearson %.4f\n",
              report.graph.mae, report.graph.r2, report.graph.pearson, report.baseline.mae, report.baseline.r2,
              report.baseline.pearson);
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, bool corrupt, const std::string& out) {
  lgbg::ModelCheckOptions options;
  options.corrupt_gradient = corrupt;
  const auto report = lgbg::model_gradient_check(seed, options);
  constexpr double kTolerance = 1e-4;
  std::ostringstream text;
  char line[256];
  for (const auto& e : report.entries) {
    std::snprintf(line, sizeof line, "%-32s %6zu coords  max rel err %.3e\n", e.name.c_str(), e.coordinates,
                  e.max_rel_error);
    text << line;
  }
  const bool ok = report.max_rel_error < kTolerance;
  std::snprintf(line, sizeof line, "%s: max rel err %.3e (tolerance %.0e, seed %llu)\n", ok ? "PASS" : "FAIL",
                report.max_rel_error, kTolerance, static_cast<unsigned long long>(seed));
  text << line;
  std::cout << text.str();
  if (!out.empty()) {
    ensure_dir(out);
    write_text(fs::path(out) / "gradcheck.txt", text.str());
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local/global behavior graph model: graph building, training, evaluation"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  std::string log_path, vocab_path, labels_path, out, data_dir, checkpoint, spec_path, scenario = "combined",
                                                                                     sample_id;
  std::optional<std::int64_t> day_origin;
  std::optional<std::uint64_t> seed_opt;
  std::size_t span = 3, splits = 10, k = 3;
  bool baseline = false, corrupt = false;
  std::uint64_t gc_seed = 0;
  ConfigFlags flags;

  auto* build = app.add_subcommand("build-graph", "Build per-day local context graphs from an event log");
  build->add_option("--log", log_path, "event log (JSON lines)")->required();
  build->add_option("--vocab", vocab_path, "vocabulary file")->required();
  build->add_option("--labels", labels_path, "CSV day,pam");
  build->add_option("--out", out, "output directory")->required();
  build->add_option("--day-origin", day_origin, "epoch seconds of day 0");
  build->add_option("--span", span, "days per sample");
  build->add_option("--config", flags.config_path, "JSON file of dotted config keys");
  build->add_option("--set", flags.sets, "key=value override");

  auto* train = app.add_subcommand("train", "Run the split protocol and save a checkpoint");
  train->add_option("--data", data_dir, "data directory")->required();
  train->add_option("--out", out, "output directory")->required();
  train->add_flag("--baseline", baseline, "also run the KNN behavior-feature baseline");
  flags.attach(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the split folds of a data directory");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--data", data_dir)->required();
  eval->add_option("--splits", splits);
  eval->add_option("--out", out)->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic data directory");
  synth->add_option("--spec", spec_path, "scenario spec JSON");
  synth->add_option("--scenario", scenario, "built-in scenario")
      ->check(CLI::IsMember(lgbg::builtin_scenarios()));
  synth->add_option("--seed", seed_opt);
  synth->add_option("--out", out)->required();

  auto* inspect = app.add_subcommand("inspect", "Export node, edge and day attention of one sample");
  inspect->add_option("--checkpoint", checkpoint)->required();
  inspect->add_option("--data", data_dir)->required();
  inspect->add_option("--sample", sample_id, "sample index or subject:day")->required();
  inspect->add_option("--out", out)->required();

  auto* grade = app.add_subcommand("grade", "Leave-one-out KNN grade regression from a checkpoint");
  grade->add_option("--checkpoint", checkpoint)->required();
  grade->add_option("--data", data_dir)->required();
  grade->add_option("--k", k);
  grade->add_option("--out", out)->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the model gradient");
  gradcheck->add_option("--seed", gc_seed);
  gradcheck->add_option("--out", out);
  gradcheck->add_flag("--corrupt-gradient", corrupt)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*build) exit_code = cmd_build_graph(log_path, vocab_path, labels_path, out, day_origin, span, flags);
    else if (*train) exit_code = cmd_train(data_dir, out, baseline, flags);
    else if (*eval) exit_code = cmd_eval(checkpoint, data_dir, splits, out);
    else if (*synth) exit_code = cmd_synth(spec_path, scenario, out, seed_opt);
    else if (*inspect) exit_code = cmd_inspect(checkpoint, data_dir, sample_id, out);
    else if (*grade) exit_code = cmd_grade(checkpoint, data_dir, k, out);
    else if (*gradcheck) {
      if (gradcheck->count("--seed") == 0)
        if (auto s = env_seed()) gc_seed = *s;
      exit_code = cmd_gradcheck(gc_seed, corrupt, out);
    }
  } catch (const lgbg::Error& e) {
    std::cerr << "error (" << lgbg::to_string(e.kind()) << "): " << e.what() << "\n";
    return e.is_input_error() ? kExitInput : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return exit_code;
}
