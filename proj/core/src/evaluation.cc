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

#include "mcnorm/evaluation.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mcnorm/baseline.h"
#include "mcnorm/error.h"
#include "mcnorm/rng.h"

namespace mcnorm {
namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct FoldResult {
  double accuracy = 0.0;
  std::size_t n_test = 0;
};

FoldResult run_fold(const Dataset &dataset, const FoldAssignment &folds, int fold,
                    const ModelSpec &spec, const TrainConfig &config, const EvalResources &resources,
                    const CrossValidationOptions &options) {
  const TrainTestSplit split = train_test_split(folds, fold);
  if (split.test.empty()) {
    throw Error(ErrorCode::kInconsistentFolds, "fold " + std::to_string(fold) + " has no test mentions");
  }
  if (split.train.empty()) {
    throw Error(ErrorCode::kInconsistentFolds, "fold " + std::to_string(fold) + " leaves no training data");
  }
  const std::vector<Mention> train_set = dataset.select(split.train);
  const std::vector<Mention> test = dataset.select(split.test);

  std::vector<std::optional<std::string>> predictions;
  std::vector<std::string> gold;
  predictions.reserve(test.size());
  gold.reserve(test.size());
  for (const Mention &m : test) gold.push_back(m.code);

  if (spec.kind == ModelKind::kBaseline) {
    const LexiconIndex lexicon = build_lexicon(train_set);
    for (const Mention &m : test) predictions.push_back(baseline_predict(lexicon, m.text));
  } else {
    if (resources.dictionary == nullptr || !resources.embeddings) {
      throw Error(ErrorCode::kBadConfig, "the joint model needs a terminology and embeddings");
    }
    TrainConfig fold_config = config;
    fold_config.seed = mix_seed(config.seed, static_cast<std::uint64_t>(fold));
    const TrainResult trained =
        train(train_set, *resources.dictionary, resources.embeddings, spec.joint, fold_config);
    for (const Mention &m : test) predictions.push_back(predict(trained.model, m.text).code);
    if (options.model_dir) {
      save_model(trained.model, *options.model_dir / ("fold_" + std::to_string(fold) + ".mcnorm"));
    }
  }
  return FoldResult{accuracy(predictions, gold), test.size()};
}

}  // namespace

double accuracy(std::span<const std::optional<std::string>> predictions, std::span<const std::string> gold) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(predictions.size()) + " predictions vs " + std::to_string(gold.size()) +
                    " gold labels");
  }
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "no predictions to score");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i] && *predictions[i] == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

const char *model_kind_name(ModelKind kind) {
  return kind == ModelKind::kBaseline ? "baseline" : "joint";
}

std::string describe(const ModelSpec &spec) {
  if (spec.kind == ModelKind::kBaseline) return "baseline";
  std::ostringstream s;
  s << "joint/" << cell_kind_name(spec.joint.cell_kind) << "/h" << spec.joint.hidden << "/a"
    << spec.joint.attention << (spec.joint.use_sim_features ? "/sim" : "/nosim");
  return s.str();
}

std::string config_fingerprint(const ModelSpec &spec, const TrainConfig &config) {
  std::ostringstream s;
  s << describe(spec);
  if (spec.kind == ModelKind::kJoint) {
    s.precision(17);
    s << ";epochs=" << config.epochs << ";batch=" << config.batch_size << ";lr=" << config.learning_rate
      << ";opt=" << optimizer_name(config.optimizer) << ";seed=" << config.seed
      << ";clip=" << (config.clip_norm ? *config.clip_norm : 0.0)
      << ";shuffle=" << config.shuffle_each_epoch;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s.str())));
  return buf;
}

EvalReport cross_validate(const Dataset &dataset, const FoldAssignment &folds, const ModelSpec &spec,
                          const TrainConfig &config, const EvalResources &resources,
                          const CrossValidationOptions &options) {
  validate_folds(folds, dataset);
  if (spec.kind == ModelKind::kJoint) validate(config);
  if (options.model_dir) std::filesystem::create_directories(*options.model_dir);

  const int k = folds.k;
  std::vector<FoldResult> results(k);
  const int jobs = std::clamp(options.jobs, 1, k);
  if (jobs == 1) {
    for (int i = 0; i < k; ++i) results[i] = run_fold(dataset, folds, i, spec, config, resources, options);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> workers;
    for (int j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        for (int i = next++; i < k; i = next++) {
          try {
            results[i] = run_fold(dataset, folds, i, spec, config, resources, options);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto &w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  EvalReport report;
  report.fold_kind = folds.kind;
  report.k = k;
  report.seed = config.seed;
  report.fold_seed = folds.seed;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    report.per_fold_accuracy.push_back(results[i].accuracy);
    report.n_test_per_fold.push_back(results[i].n_test);
    sum += results[i].accuracy;
    spdlog::info("fold {}: accuracy {:.4f} on {} mentions", i, results[i].accuracy, results[i].n_test);
  }
  report.mean_accuracy = sum / static_cast<double>(k);
  report.model = describe(spec);
  report.config_fingerprint = config_fingerprint(spec, config);
  report.timestamp = utc_timestamp();
  report.dataset = dataset_stats(dataset);
  return report;
}

std::string report_to_json(const EvalReport &report) {
  nlohmann::ordered_json j;
  j["fold_kind"] = fold_kind_name(report.fold_kind);
  j["k"] = report.k;
  j["seed"] = report.seed;
  j["fold_seed"] = report.fold_seed;
  j["per_fold_accuracy"] = report.per_fold_accuracy;
  j["mean_accuracy"] = report.mean_accuracy;
  j["n_test_per_fold"] = report.n_test_per_fold;
  j["model"] = report.model;
  j["config_fingerprint"] = report.config_fingerprint;
  j["timestamp"] = report.timestamp;
  nlohmann::ordered_json per_code = nlohmann::ordered_json::object();
  for (const auto &[code, n] : report.dataset.per_code) per_code[code] = n;
  j["dataset"] = {{"mentions", report.dataset.mentions},
                  {"unique_texts", report.dataset.unique_texts},
                  {"unique_codes", report.dataset.unique_codes},
                  {"per_code", per_code}};
  return j.dump(2) + "\n";
}

void write_report(const EvalReport &report, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << report_to_json(report);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

EvalReport report_from_json(const std::string &text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.fold_kind = parse_fold_kind(j.at("fold_kind").get<std::string>());
    r.k = j.at("k").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.fold_seed = j.value("fold_seed", std::uint64_t{0});
    r.per_fold_accuracy = j.at("per_fold_accuracy").get<std::vector<double>>();
    r.mean_accuracy = j.at("mean_accuracy").get<double>();
    r.n_test_per_fold = j.at("n_test_per_fold").get<std::vector<std::size_t>>();
    r.model = j.value("model", std::string());
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("dataset")) {
      const json &d = j.at("dataset");
      r.dataset.mentions = d.value("mentions", std::size_t{0});
      r.dataset.unique_texts = d.value("unique_texts", std::size_t{0});
      r.dataset.unique_codes = d.value("unique_codes", std::size_t{0});
      if (d.contains("per_code")) {
        for (const auto &[code, n] : d.at("per_code").items()) r.dataset.per_code[code] = n.get<std::size_t>();
      }
    }
    return r;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kMalformedLine, std::string("report: ") + e.what());
  }
}

EvalReport read_report(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return report_from_json(s.str());
}

}  // namespace mcnorm
