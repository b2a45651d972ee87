// Copyright 2026 The mcnorm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mcnorm: split corpora into folds, run the exact-match baseline, train and
// cross-validate the joint model, and predict codes for new mentions.
//
// Exit codes: 0 success, 1 data or runtime error, 2 usage error.

#include <charconv>
#include <climits>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "config_args.h"
#include "mcnorm/corpus.h"
#include "mcnorm/embeddings.h"
#include "mcnorm/error.h"
#include "mcnorm/evaluation.h"
#include "mcnorm/folds.h"
#include "mcnorm/joint_model.h"
#include "mcnorm/synthgen.h"

namespace mcnorm::cli {
namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// Shortest text that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct FoldArgs {
  std::string folds_file;
  std::string kind = "random";
  int k = 5;
};

struct ModelArgs {
  std::string cell = "gru";
  int hidden = 128;
  int attention = 64;
  bool use_sim_features = false;
};

struct TrainArgs {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  double clip_norm = 0.0;  // 0 disables clipping
  bool no_shuffle = false;
};

struct Args {
  std::string dataset;
  std::string terminology;
  std::string embeddings;
  std::string out;
  std::string report;
  std::string model_dir;
  std::string container;
  std::string input = "-";
  std::uint64_t seed = 0;
  int jobs = 1;
  int test_fold = -1;
  bool per_code = false;
  FoldArgs folds;
  ModelArgs model;
  TrainArgs train;
};

void add_fold_options(CLI::App &cmd, Args &a) {
  cmd.add_option("--folds", a.folds.folds_file, "Fold file; overrides --kind/--k");
  cmd.add_option("--kind", a.folds.kind, "Fold kind when generating folds")
      ->check(CLI::IsMember({"random", "custom"}));
  cmd.add_option("--k", a.folds.k, "Number of folds when generating folds")->check(CLI::Range(2, INT_MAX));
}

void add_model_options(CLI::App &cmd, Args &a) {
  cmd.add_option("--cell", a.model.cell, "Recurrent cell")->check(CLI::IsMember({"gru", "lstm"}));
  cmd.add_option("--hidden", a.model.hidden, "Hidden units per direction")->check(CLI::Range(1, 1 << 16));
  cmd.add_option("--attention", a.model.attention, "Attention units")->check(CLI::Range(1, 1 << 16));
  cmd.add_flag("--use-sim-features", a.model.use_sim_features, "Append TF-IDF(max) similarity features");
}

void add_train_options(CLI::App &cmd, Args &a) {
  cmd.add_option("--epochs", a.train.epochs)->check(CLI::Range(1, INT_MAX));
  cmd.add_option("--batch-size", a.train.batch_size)->check(CLI::Range(1, INT_MAX));
  cmd.add_option("--lr", a.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  cmd.add_option("--optimizer", a.train.optimizer)->check(CLI::IsMember({"adam", "sgd"}));
  cmd.add_option("--clip-norm", a.train.clip_norm, "Global gradient-norm clip (0 = off)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_flag("--no-shuffle", a.train.no_shuffle, "Keep the training order fixed across epochs");
}

ModelConfig model_config(const ModelArgs &m) {
  ModelConfig c;
  c.cell_kind = parse_cell_kind(m.cell);
  c.hidden = m.hidden;
  c.attention = m.attention;
  c.use_sim_features = m.use_sim_features;
  return c;
}

TrainConfig train_config(const TrainArgs &t, std::uint64_t seed) {
  TrainConfig c;
  c.epochs = t.epochs;
  c.batch_size = t.batch_size;
  c.learning_rate = t.learning_rate;
  c.optimizer = parse_optimizer(t.optimizer);
  c.seed = seed;
  if (t.clip_norm > 0.0) c.clip_norm = t.clip_norm;
  c.shuffle_each_epoch = !t.no_shuffle;
  return c;
}

FoldAssignment resolve_folds(const Args &a, const Dataset &dataset) {
  if (!a.folds.folds_file.empty()) {
    FoldAssignment folds = read_fold_file(a.folds.folds_file, dataset);
    validate_folds(folds, dataset);
    return folds;
  }
  return a.folds.kind == "custom" ? custom_kfolds(dataset, a.folds.k, a.seed)
                                  : random_kfolds(dataset, a.folds.k, a.seed);
}

void print_report(const EvalReport &report) {
  for (std::size_t f = 0; f < report.per_fold_accuracy.size(); ++f) {
    std::printf("fold %zu: accuracy %.4f (n=%zu)\n", f, report.per_fold_accuracy[f], report.n_test_per_fold[f]);
  }
  std::printf("mean accuracy: %.4f\n", report.mean_accuracy);
}

int cmd_split(const Args &a) {
  const Dataset dataset = load_dataset(a.dataset);
  const FoldAssignment folds = resolve_folds(a, dataset);
  write_fold_file(folds, a.out);
  std::printf("kind=%s k=%d seed=%llu\n", fold_kind_name(folds.kind), folds.k,
              static_cast<unsigned long long>(folds.seed));
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    std::printf("fold %zu: %zu mentions\n", f, folds.folds[f].size());
  }
  if (folds.kind == FoldKind::kCustom) std::printf("dropped duplicates: %zu\n", folds.dropped_ids.size());
  return 0;
}

int cmd_baseline(const Args &a) {
  const Dataset dataset = load_dataset(a.dataset);
  const FoldAssignment folds = resolve_folds(a, dataset);
  EvalReport report = cross_validate(dataset, folds, ModelSpec{}, TrainConfig{});
  report.seed = a.seed;
  print_report(report);
  if (!a.report.empty()) write_report(report, a.report);
  return 0;
}

std::shared_ptr<const EmbeddingTable> load_table(const std::string &path) {
  return std::make_shared<const EmbeddingTable>(load_embeddings(path));
}

int cmd_train(const Args &a) {
  const Dataset dataset = load_dataset(a.dataset);
  const TerminologyDictionary dictionary = load_terminology(a.terminology);
  const auto embeddings = load_table(a.embeddings);
  std::vector<Mention> train_set(dataset.mentions().begin(), dataset.mentions().end());
  if (a.test_fold >= 0) {
    if (a.folds.folds_file.empty()) throw Error(ErrorCode::kBadConfig, "--test-fold needs --folds");
    const FoldAssignment folds = resolve_folds(a, dataset);
    train_set = dataset.select(train_test_split(folds, a.test_fold).train);
  }
  const TrainResult result =
      train(train_set, dictionary, embeddings, model_config(a.model), train_config(a.train, a.seed));
  save_model(result.model, a.out);
  std::printf("trained on %zu mentions, %d codes\n", train_set.size(), result.model.num_classes());
  std::printf("final loss: %.6f\n", result.loss_trace.back());
  return 0;
}

// Scores a fixed container on the test ids of every fold.
EvalReport score_container(const Args &a, const Dataset &dataset, const FoldAssignment &folds) {
  const JointModel model = load_model(a.container, load_table(a.embeddings));
  EvalReport report;
  report.fold_kind = folds.kind;
  report.k = folds.k;
  report.seed = a.seed;
  report.fold_seed = folds.seed;
  report.model = "container:" + a.container;
  report.dataset = dataset_stats(dataset);
  for (int f = 0; f < folds.k; ++f) {
    std::vector<std::optional<std::string>> predictions;
    std::vector<std::string> gold;
    for (MentionId id : folds.folds[f]) {
      predictions.push_back(predict(model, dataset.at(id).text).code);
      gold.push_back(dataset.at(id).code);
    }
    report.per_fold_accuracy.push_back(accuracy(predictions, gold));
    report.n_test_per_fold.push_back(gold.size());
  }
  double sum = 0.0;
  for (double acc : report.per_fold_accuracy) sum += acc;
  report.mean_accuracy = sum / static_cast<double>(report.per_fold_accuracy.size());
  return report;
}

int cmd_evaluate(const Args &a) {
  const Dataset dataset = load_dataset(a.dataset);
  const FoldAssignment folds = resolve_folds(a, dataset);
  EvalReport report;
  if (!a.container.empty()) {
    report = score_container(a, dataset, folds);
  } else {
    if (a.terminology.empty()) throw Error(ErrorCode::kBadConfig, "--terminology is required for training");
    const TerminologyDictionary dictionary = load_terminology(a.terminology);
    ModelSpec spec;
    spec.kind = ModelKind::kJoint;
    spec.joint = model_config(a.model);
    CrossValidationOptions options;
    options.jobs = a.jobs;
    if (!a.model_dir.empty()) {
      std::filesystem::create_directories(a.model_dir);
      options.model_dir = a.model_dir;
    }
    report = cross_validate(dataset, folds, spec, train_config(a.train, a.seed), {&dictionary, load_table(a.embeddings)},
                            options);
  }
  print_report(report);
  if (!a.report.empty()) write_report(report, a.report);
  return 0;
}

int cmd_predict(const Args &a) {
  const JointModel model = load_model(a.container, load_table(a.embeddings));
  std::ifstream file;
  if (a.input != "-") {
    file.open(a.input, std::ios::binary);
    if (!file) throw Error(ErrorCode::kMissingFile, a.input);
  }
  std::istream &in = a.input == "-" ? std::cin : file;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const Prediction p = predict(model, line);
    std::printf("%s\t%s\t%s\n", line.c_str(), p.code.c_str(), exact(p.probability).c_str());
  }
  return 0;
}

int cmd_stats(const Args &a) {
  const Dataset dataset = load_dataset(a.dataset);
  const DatasetStats stats = dataset_stats(dataset);
  std::printf("mentions: %zu\nunique texts: %zu\ncodes: %zu\n", stats.mentions, stats.unique_texts,
              stats.unique_codes);
  if (!a.terminology.empty()) {
    const TerminologyDictionary dictionary = load_terminology(a.terminology);
    std::size_t terms = 0, covered = 0;
    for (const auto &entry : dictionary.entries()) terms += entry.terms.size();
    for (const std::string &code : dataset.label_set()) covered += dictionary.contains(code) ? 1 : 0;
    std::printf("dictionary codes: %zu\ndictionary terms: %zu\ndataset codes in dictionary: %zu\n",
                dictionary.size(), terms, covered);
  }
  if (a.per_code) {
    for (const auto &[code, n] : stats.per_code) std::printf("%s\t%zu\n", code.c_str(), n);
  }
  return 0;
}

struct SynthArgs {
  SynthSpec spec;
  std::vector<std::string> noise = {"drop", "swap", "filler"};
  int embedding_dim = 32;
  double noise_scale = 0.1;
};

int cmd_synth(const Args &a, SynthArgs s) {
  s.spec.seed = a.seed;
  s.spec.noise_ops.clear();
  for (const std::string &op : s.noise) {
    if (op == "drop") s.spec.noise_ops.insert(NoiseOp::kTokenDrop);
    if (op == "swap") s.spec.noise_ops.insert(NoiseOp::kTokenSwap);
    if (op == "filler") s.spec.noise_ops.insert(NoiseOp::kFillerInsert);
  }
  const SynthCorpus corpus = generate(s.spec);
  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  write_dataset(corpus.dataset, dir / "dataset.tsv");
  write_terminology(corpus.dictionary, dir / "terminology.tsv");
  write_embeddings(generate_embeddings(corpus.dictionary, s.embedding_dim, a.seed, s.noise_scale),
                   dir / "embeddings.txt");
  std::printf("wrote %zu mentions over %zu codes to %s\n", corpus.dataset.size(), corpus.dictionary.size(),
              dir.string().c_str());
  return 0;
}

int run(int argc, char **argv) {
  CLI::App app{"Medical concept normalization: folds, baseline and joint model"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "mcnorm 0.1.0");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  Args a;
  SynthArgs synth;
  auto add_common = [&](CLI::App *cmd) {
    // Parsed by expand_config() before CLI11 sees the arguments; declared
    // here for --help.
    cmd->add_option("--config", "INI key = value file; command-line flags override it");
    cmd->add_option("--seed", a.seed, "Seed for folds, initialization and shuffling");
  };

  CLI::App *split = app.add_subcommand("split", "Write a fold file");
  split->add_option("--dataset", a.dataset)->required();
  split->add_option("--out", a.out, "Fold file to write")->required();
  split->add_option("--kind", a.folds.kind)->check(CLI::IsMember({"random", "custom"}));
  split->add_option("--k", a.folds.k)->check(CLI::Range(2, INT_MAX));
  add_common(split);

  CLI::App *baseline = app.add_subcommand("baseline", "Cross-validate the exact-match baseline");
  baseline->add_option("--dataset", a.dataset)->required();
  baseline->add_option("--report", a.report, "JSON report to write");
  add_fold_options(*baseline, a);
  add_common(baseline);

  CLI::App *train_cmd = app.add_subcommand("train", "Train the joint model and save a container");
  train_cmd->add_option("--dataset", a.dataset)->required();
  train_cmd->add_option("--terminology", a.terminology)->required();
  train_cmd->add_option("--embeddings", a.embeddings)->required();
  train_cmd->add_option("--out", a.out, "Container to write")->required();
  train_cmd->add_option("--folds", a.folds.folds_file, "Fold file used with --test-fold");
  train_cmd->add_option("--test-fold", a.test_fold, "Train on every fold but this one")
      ->check(CLI::NonNegativeNumber);
  add_model_options(*train_cmd, a);
  add_train_options(*train_cmd, a);
  add_common(train_cmd);

  CLI::App *evaluate = app.add_subcommand("evaluate", "Cross-validate the joint model");
  evaluate->add_option("--dataset", a.dataset)->required();
  evaluate->add_option("--terminology", a.terminology);
  evaluate->add_option("--embeddings", a.embeddings)->required();
  evaluate->add_option("--container", a.container, "Score this trained model instead of training");
  evaluate->add_option("--report", a.report, "JSON report to write");
  evaluate->add_option("--model-dir", a.model_dir, "Directory for per-fold containers");
  evaluate->add_option("--jobs", a.jobs, "Folds trained concurrently")->check(CLI::Range(1, 1024));
  add_fold_options(*evaluate, a);
  add_model_options(*evaluate, a);
  add_train_options(*evaluate, a);
  add_common(evaluate);

  CLI::App *predict_cmd = app.add_subcommand("predict", "Predict codes for one mention per line");
  predict_cmd->add_option("--model", a.container, "Trained container")->required();
  predict_cmd->add_option("--embeddings", a.embeddings)->required();
  predict_cmd->add_option("--input", a.input, "Input file, - for standard input");
  add_common(predict_cmd);

  CLI::App *stats = app.add_subcommand("stats", "Print corpus statistics");
  stats->add_option("--dataset", a.dataset)->required();
  stats->add_option("--terminology", a.terminology);
  stats->add_flag("--per-code", a.per_code, "List mention counts per code");
  add_common(stats);

  CLI::App *synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus, terminology and embeddings");
  synth_cmd->add_option("--out", a.out, "Output directory")->required();
  synth_cmd->add_option("--n-codes", synth.spec.n_codes)->check(CLI::Range(2, INT_MAX));
  synth_cmd->add_option("--synonyms", synth.spec.synonyms_per_code)->check(CLI::Range(1, INT_MAX));
  synth_cmd->add_option("--mentions", synth.spec.mentions_per_code)->check(CLI::Range(1, INT_MAX));
  synth_cmd->add_option("--duplicate-rate", synth.spec.duplicate_rate)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--pool-size", synth.spec.pool_size)->check(CLI::Range(2, INT_MAX));
  synth_cmd->add_option("--noise", synth.noise, "Noise ops")
      ->check(CLI::IsMember({"drop", "swap", "filler"}))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  synth_cmd->add_option("--embedding-dim", synth.embedding_dim)->check(CLI::Range(2, 1 << 16));
  synth_cmd->add_option("--noise-scale", synth.noise_scale)->check(CLI::NonNegativeNumber);
  add_common(synth_cmd);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args));
    // CLI11 parses a reversed argument vector with the program name removed.
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kMissingFile ? kExitData : kExitUsage;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("mcnorm"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (split->parsed()) return cmd_split(a);
    if (baseline->parsed()) return cmd_baseline(a);
    if (train_cmd->parsed()) return cmd_train(a);
    if (evaluate->parsed()) return cmd_evaluate(a);
    if (predict_cmd->parsed()) return cmd_predict(a);
    if (stats->parsed()) return cmd_stats(a);
    if (synth_cmd->parsed()) return cmd_synth(a, synth);
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kBadConfig || e.code() == ErrorCode::kBadK ? kExitUsage : kExitData;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace mcnorm::cli

int main(int argc, char **argv) { return mcnorm::cli::run(argc, argv); }
