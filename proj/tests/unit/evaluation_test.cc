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

#include <numeric>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mcnorm/baseline.h"
#include "mcnorm/error.h"
#include "mcnorm/rng.h"
#include "mcnorm/synthgen.h"
#include "test_util.h"

namespace mcnorm {
namespace {

using testing::error_code_of;
using Predictions = std::vector<std::optional<std::string>>;
using Gold = std::vector<std::string>;

TEST(AccuracyTest, Examples) {
  EXPECT_EQ(accuracy(Predictions{"A", "B"}, Gold{"A", "B"}), 1.0);
  EXPECT_EQ(accuracy(Predictions{"A", std::nullopt, "C", "X"}, Gold{"A", "B", "C", "D"}), 0.5);
}

TEST(AccuracyTest, MatchesRecount) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(40);
    Predictions pred(n);
    Gold gold(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = "C" + std::to_string(rng.uniform_int(3));
      if (rng.uniform() < 0.8) pred[i] = "C" + std::to_string(rng.uniform_int(3));
    }
    for (std::size_t i = 0; i < n; ++i) hits += pred[i].has_value() && *pred[i] == gold[i];
    EXPECT_NEAR(accuracy(pred, gold), static_cast<double>(hits) / static_cast<double>(n), 1e-12);
  }
}

TEST(AccuracyTest, Errors) {
  EXPECT_EQ(error_code_of([] { accuracy(Predictions{"A"}, Gold{"A", "B"}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(error_code_of([] { accuracy(Predictions{}, Gold{}); }), ErrorCode::kEmptyInput);
}

// Every text occurs several times, so Random folds leak it into training.
Dataset repeated_corpus() {
  std::vector<Mention> mentions;
  for (int i = 0; i < 60; ++i) {
    mentions.push_back({i, "text " + std::to_string(i % 10), "C" + std::to_string(i % 10 % 3), {}, {}});
  }
  return Dataset(std::move(mentions));
}

// Baseline accuracy recomputed fold by fold with the lexicon directly.
double baseline_oracle(const Dataset &ds, const FoldAssignment &fa) {
  double total = 0.0;
  for (int f = 0; f < fa.k; ++f) {
    const TrainTestSplit split = train_test_split(fa, f);
    const LexiconIndex lex = build_lexicon(ds.select(split.train));
    std::size_t hits = 0;
    for (MentionId id : split.test) hits += baseline_predict(lex, ds.at(id).text) == ds.at(id).code;
    total += static_cast<double>(hits) / static_cast<double>(split.test.size());
  }
  return total / fa.k;
}

TEST(CrossValidateTest, BaselineRandomFoldsNearOne) {
  const Dataset ds = repeated_corpus();
  const FoldAssignment fa = random_kfolds(ds, 5, 3);
  const EvalReport report = cross_validate(ds, fa, ModelSpec{}, TrainConfig{});
  EXPECT_DOUBLE_EQ(report.mean_accuracy, baseline_oracle(ds, fa));
  EXPECT_GT(report.mean_accuracy, 0.95);
  ASSERT_EQ(report.per_fold_accuracy.size(), 5u);
  EXPECT_EQ(report.n_test_per_fold, (std::vector<std::size_t>{12, 12, 12, 12, 12}));
  const double mean = std::accumulate(report.per_fold_accuracy.begin(), report.per_fold_accuracy.end(), 0.0) / 5;
  EXPECT_DOUBLE_EQ(report.mean_accuracy, mean);
  EXPECT_EQ(report.model, "baseline");
  EXPECT_EQ(report.fold_kind, FoldKind::kRandom);
  EXPECT_EQ(report.fold_seed, 3u);
  EXPECT_EQ(report.dataset.mentions, 60u);
}

TEST(CrossValidateTest, BaselineCustomFoldsIsZero) {
  SynthSpec spec;
  spec.duplicate_rate = 0.3;
  const SynthCorpus corpus = generate(spec);
  const FoldAssignment fa = custom_kfolds(corpus.dataset, 5, 0);
  const EvalReport report = cross_validate(corpus.dataset, fa, ModelSpec{}, TrainConfig{});
  EXPECT_EQ(report.mean_accuracy, 0.0);
  for (double a : report.per_fold_accuracy) EXPECT_EQ(a, 0.0);
}

TEST(CrossValidateTest, JointModelSmallRun) {
  SynthSpec spec;
  spec.n_codes = 4;
  spec.mentions_per_code = 10;
  const SynthCorpus corpus = generate(spec);
  auto emb = std::make_shared<const EmbeddingTable>(generate_embeddings(corpus.dictionary, 8, 0));
  ModelSpec ms;
  ms.kind = ModelKind::kJoint;
  ms.joint.hidden = 4;
  ms.joint.attention = 3;
  ms.joint.use_sim_features = true;
  TrainConfig tc;
  tc.epochs = 3;
  tc.learning_rate = 0.01;
  const FoldAssignment fa = custom_kfolds(corpus.dataset, 2, 0);
  testing::TempDir dir;
  CrossValidationOptions opts;
  opts.model_dir = dir.path();
  const EvalReport report = cross_validate(corpus.dataset, fa, ms, tc, {&corpus.dictionary, emb}, opts);
  EXPECT_EQ(report.model, "joint/gru/h4/a3/sim");
  EXPECT_EQ(report.per_fold_accuracy.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "fold_0.mcnorm"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fold_1.mcnorm"));
  EXPECT_EQ(error_code_of([&] { cross_validate(corpus.dataset, fa, ms, tc); }), ErrorCode::kBadConfig);
}

TEST(CrossValidateTest, InconsistentFolds) {
  const Dataset ds = repeated_corpus();
  FoldAssignment fa = random_kfolds(ds, 3, 0);
  fa.folds[0].pop_back();
  EXPECT_EQ(error_code_of([&] { cross_validate(ds, fa, ModelSpec{}, TrainConfig{}); }),
            ErrorCode::kInconsistentFolds);
  FoldAssignment empty = random_kfolds(ds, 3, 0);
  empty.dropped_ids = empty.folds[1];
  std::sort(empty.dropped_ids.begin(), empty.dropped_ids.end());
  empty.folds[1].clear();
  EXPECT_EQ(error_code_of([&] { cross_validate(ds, empty, ModelSpec{}, TrainConfig{}); }),
            ErrorCode::kInconsistentFolds);
}

TEST(CrossValidateTest, OfficialSplitGivesOneAccuracy) {
  const Dataset ds = repeated_corpus();
  FoldAssignment fa;
  fa.kind = FoldKind::kImported;
  fa.k = 1;
  fa.folds.resize(1);
  for (MentionId id : ds.ids()) (id < 45 ? fa.train_only_ids : fa.folds[0]).push_back(id);
  const EvalReport report = cross_validate(ds, fa, ModelSpec{}, TrainConfig{});
  ASSERT_EQ(report.per_fold_accuracy.size(), 1u);
  EXPECT_EQ(report.n_test_per_fold[0], 15u);
  EXPECT_DOUBLE_EQ(report.mean_accuracy, baseline_oracle(ds, fa));
}

TEST(ReportTest, JsonRoundTripIsExact) {
  const Dataset ds = repeated_corpus();
  const EvalReport report = cross_validate(ds, random_kfolds(ds, 4, 9), ModelSpec{}, TrainConfig{});
  testing::TempDir dir;
  write_report(report, dir / "r.json");
  EXPECT_EQ(read_report(dir / "r.json"), report);
  const nlohmann::json j = nlohmann::json::parse(testing::read_file(dir / "r.json"));
  EXPECT_EQ(j.at("k"), 4);
  EXPECT_EQ(j.at("per_fold_accuracy").size(), 4u);
  EXPECT_EQ(j.at("fold_kind"), "random");
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_TRUE(j.contains("config_fingerprint"));
}

TEST(ReportTest, RepeatedRunsDifferOnlyInTimestamp) {
  const Dataset ds = repeated_corpus();
  const FoldAssignment fa = custom_kfolds(ds, 3, 1);
  EvalReport a = cross_validate(ds, fa, ModelSpec{}, TrainConfig{});
  EvalReport b = cross_validate(ds, fa, ModelSpec{}, TrainConfig{});
  a.timestamp = b.timestamp = "";
  EXPECT_EQ(report_to_json(a), report_to_json(b));
}

TEST(ReportTest, MalformedJson) {
  EXPECT_EQ(error_code_of([] { report_from_json("{not json"); }), ErrorCode::kMalformedLine);
}

TEST(FingerprintTest, SensitiveToConfig) {
  ModelSpec spec;
  spec.kind = ModelKind::kJoint;
  TrainConfig tc;
  const std::string base = config_fingerprint(spec, tc);
  EXPECT_EQ(base.size(), 16u);
  EXPECT_EQ(config_fingerprint(spec, tc), base);
  tc.learning_rate = 2e-3;
  EXPECT_NE(config_fingerprint(spec, tc), base);
  tc = TrainConfig{};
  spec.joint.use_sim_features = true;
  EXPECT_NE(config_fingerprint(spec, tc), base);
  EXPECT_EQ(describe(spec), "joint/gru/h128/a64/sim");
}

}  // namespace
}  // namespace mcnorm
