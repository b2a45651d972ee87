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

#ifndef MCNORM_EVALUATION_H_
#define MCNORM_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcnorm/corpus.h"
#include "mcnorm/embeddings.h"
#include "mcnorm/folds.h"
#include "mcnorm/joint_model.h"

namespace mcnorm {

// Fraction of positions where a prediction exists and equals gold.
// Throws LengthMismatch or EmptyInput.
double accuracy(std::span<const std::optional<std::string>> predictions,
                std::span<const std::string> gold);

enum class ModelKind { kBaseline, kJoint };

const char *model_kind_name(ModelKind kind);  // "baseline", "joint"

struct ModelSpec {
  ModelKind kind = ModelKind::kBaseline;
  ModelConfig joint;  // used when kind == kJoint
};

// Inputs the joint model needs; ignored by the baseline.
struct EvalResources {
  const TerminologyDictionary *dictionary = nullptr;
  std::shared_ptr<const EmbeddingTable> embeddings;
};

struct CrossValidationOptions {
  int jobs = 1;  // folds trained concurrently
  // When set, the model of fold i is saved as fold_<i>.mcnorm here.
  std::optional<std::filesystem::path> model_dir;
};

struct EvalReport {
  FoldKind fold_kind = FoldKind::kRandom;
  int k = 0;
  std::uint64_t seed = 0;       // training seed
  std::uint64_t fold_seed = 0;  // seed the folds were built with
  std::vector<double> per_fold_accuracy;
  double mean_accuracy = 0.0;   // unweighted mean over folds
  std::vector<std::size_t> n_test_per_fold;
  std::string model;            // "baseline" or e.g. "joint/gru/h32/a16/sim"
  std::string config_fingerprint;
  std::string timestamp;        // UTC, ISO 8601
  DatasetStats dataset;

  bool operator==(const EvalReport &) const = default;
};

// 64-bit FNV-1a of a canonical rendering of the model and training config,
// as 16 hex digits.
std::string config_fingerprint(const ModelSpec &spec, const TrainConfig &config);
std::string describe(const ModelSpec &spec);

// Trains on all folds but i (plus train-only ids) and scores fold i, for
// every fold. Fold i trains with seed mix_seed(config.seed, i). Dropped
// mentions are never scored. Throws InconsistentFolds.
EvalReport cross_validate(const Dataset &dataset, const FoldAssignment &folds, const ModelSpec &spec,
                          const TrainConfig &config, const EvalResources &resources = {},
                          const CrossValidationOptions &options = {});

// JSON report with fold_kind, k, seed, per_fold_accuracy, mean_accuracy,
// n_test_per_fold, timestamp and config_fingerprint at the top level.
void write_report(const EvalReport &report, const std::filesystem::path &path);
std::string report_to_json(const EvalReport &report);
EvalReport read_report(const std::filesystem::path &path);
EvalReport report_from_json(const std::string &json);

}  // namespace mcnorm

#endif  // MCNORM_EVALUATION_H_
