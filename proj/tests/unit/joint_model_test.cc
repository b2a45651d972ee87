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

#include "mcnorm/joint_model.h"

#include <cmath>
#include <cstring>
#include <limits>

#include <gtest/gtest.h>

#include "mcnorm/error.h"
#include "mcnorm/gradcheck.h"
#include "mcnorm/rng.h"
#include "mcnorm/synthgen.h"
#include "test_util.h"

namespace mcnorm {
namespace {

using testing::error_code_of;

struct Toy {
  TerminologyDictionary dictionary;
  std::vector<Mention> mentions;
  std::shared_ptr<const EmbeddingTable> embeddings;
};

// Three codes whose mentions are identified by a single token.
Toy toy(int dim = 4) {
  Toy t;
  t.dictionary.add("C_DRY", "dry mouth");
  t.dictionary.add("C_DRY", "xerostomia");
  t.dictionary.add("C_HEAD", "headache");
  t.dictionary.add("C_NAU", "nausea");
  t.dictionary.add("C_NAU", "feeling sick");
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"dry mouth", "C_DRY"},     {"mouth so dry", "C_DRY"}, {"very dry", "C_DRY"},
      {"bad headache", "C_HEAD"}, {"headache", "C_HEAD"},    {"my headache", "C_HEAD"},
      {"nausea", "C_NAU"},        {"bad nausea", "C_NAU"},   {"feeling sick", "C_NAU"}};
  for (const auto &[text, code] : rows) {
    t.mentions.push_back({static_cast<MentionId>(t.mentions.size()), text, code, {}, {}});
  }
  const std::vector<std::string> vocab = {"dry", "mouth", "xerostomia", "headache", "nausea",
                                          "feeling", "sick", "bad", "my", "so", "very"};
  SplitMix64 rng(99);
  std::vector<double> data;
  for (std::size_t i = 0; i < vocab.size() * dim; ++i) data.push_back(rng.normal());
  t.embeddings = std::make_shared<const EmbeddingTable>(vocab, data, dim);
  return t;
}

ModelConfig small_config(bool sim, CellKind cell = CellKind::kGru) {
  ModelConfig c;
  c.cell_kind = cell;
  c.hidden = 2;
  c.attention = 2;
  c.use_sim_features = sim;
  return c;
}

void randomize(ParamSet &p, std::uint64_t seed, double scale = 0.5) {
  SplitMix64 rng(seed);
  for (double &v : p.values()) v = scale * rng.normal();
}

bool bitwise_equal(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

TEST(JointModelTest, ZeroOutputLayerIsUniform) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 1);
  EXPECT_EQ(model.num_classes(), 3);
  EXPECT_EQ(model.code_order()[0], "C_DRY");
  const Eigen::VectorXd p = forward(model, "dry mouth");
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(p[c], 1.0 / 3.0);
}

TEST(JointModelTest, ProbabilitiesSumToOne) {
  const Toy t = toy();
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 2);
  randomize(model.output(), 3, 4.0);
  for (const char *text : {"", "dry", "bad headache nausea", "unknown words only"}) {
    const Eigen::VectorXd p = forward(model, text);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GT(p.minCoeff(), 0.0);
  }
}

TEST(JointModelTest, SimBlockMarksExactSynonym) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 4);
  const PreparedExample ex = prepare_example(model, "Feeling  Sick", "C_NAU");
  ASSERT_EQ(ex.sim.size(), 3);
  EXPECT_NEAR(ex.sim[2], 1.0, 1e-15);
  EXPECT_EQ(ex.label, 2);
  EXPECT_EQ(model.feature_dim(), 4 + 3);
}

TEST(JointModelTest, WithoutSimFeatures) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(false), 4);
  EXPECT_EQ(model.similarity(), nullptr);
  EXPECT_EQ(model.sim_dim(), 0);
  EXPECT_EQ(prepare_example(model, "nausea").sim.size(), 0);
  EXPECT_EQ(model.output().matrix(JointModel::kOutW).rows(), 4);
}

TEST(JointModelTest, EmptyMentionUsesUnk) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(false), 4);
  const PreparedExample ex = prepare_example(model, " ,, ");
  ASSERT_EQ(ex.inputs.cols(), 1);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(ex.inputs(i, 0), t.embeddings->unk_vector()[i]);
  EXPECT_EQ(ex.label, -1);
}

TEST(ArgmaxTest, Ties) {
  EXPECT_EQ(argmax(Eigen::Vector3d(0.1, 0.7, 0.2)), 1);
  EXPECT_EQ(argmax(Eigen::Vector3d(0.5, 0.5, 0.1)), 0);
  EXPECT_EQ(argmax(Eigen::Vector3d(0.1, 0.5, 0.5)), 1);
}

TEST(PredictTest, ForcedLogitAndTie) {
  const Toy t = toy();
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(false), 5);
  EXPECT_EQ(predict(model, "anything").code, "C_DRY");
  model.output().vector(JointModel::kOutB)[2] = 3.0;
  const Prediction p = predict(model, "anything");
  EXPECT_EQ(p.code, "C_NAU");
  EXPECT_GT(p.probability, 0.5);
  EXPECT_LE(p.probability, 1.0);
}

TEST(PredictTest, ShiftingLogitsChangesNothing) {
  const Toy t = toy();
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 6);
  randomize(model.output(), 7);
  const Eigen::VectorXd before = forward(model, "bad nausea");
  model.output().vector(JointModel::kOutB).array() += 100.0;
  EXPECT_TRUE(forward(model, "bad nausea").isApprox(before, 1e-12));
}

class JointGradientTest : public ::testing::TestWithParam<std::tuple<CellKind, bool>> {};

TEST_P(JointGradientTest, MatchesFiniteDifferences) {
  const auto [cell, sim] = GetParam();
  const Toy t = toy(3);
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(sim, cell), 8);
  randomize(model.encoder().params(), 9);
  randomize(model.output(), 10);
  std::vector<PreparedExample> batch;
  for (const Mention &m : t.mentions) batch.push_back(prepare_example(model, m.text, m.code));
  const LossAndGrads g = loss_and_grads(model, batch);
  auto loss = [&] { return loss_and_grads(model, batch).loss; };
  const GradCheckReport enc = check_gradients(model.encoder().params(), loss, g.encoder_grads);
  const GradCheckReport out = check_gradients(model.output(), loss, g.output_grads);
  EXPECT_TRUE(enc.pass) << enc.max_rel_error;
  EXPECT_TRUE(out.pass) << out.max_rel_error;
  EXPECT_LT(std::max(enc.max_rel_error, out.max_rel_error), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Variants, JointGradientTest,
                         ::testing::Combine(::testing::Values(CellKind::kGru, CellKind::kLstm),
                                            ::testing::Bool()));

TEST(LossTest, DuplicatedBatchKeepsMeanAndGradients) {
  const Toy t = toy();
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 11);
  randomize(model.output(), 12);
  std::vector<PreparedExample> batch;
  for (const Mention &m : t.mentions) batch.push_back(prepare_example(model, m.text, m.code));
  std::vector<PreparedExample> doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  const LossAndGrads a = loss_and_grads(model, batch);
  const LossAndGrads b = loss_and_grads(model, doubled);
  EXPECT_NEAR(a.loss, b.loss, 1e-12);
  for (std::size_t i = 0; i < a.encoder_grads.size(); ++i) {
    EXPECT_NEAR(a.encoder_grads.values()[i], b.encoder_grads.values()[i], 1e-12);
  }
  for (std::size_t i = 0; i < a.output_grads.size(); ++i) {
    EXPECT_NEAR(a.output_grads.values()[i], b.output_grads.values()[i], 1e-12);
  }
}

TEST(LossTest, SaturatedExampleHasVanishingLoss) {
  const Toy t = toy();
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(false), 13);
  model.output().vector(JointModel::kOutB)[1] = 60.0;
  const PreparedExample ex = prepare_example(model, "headache", "C_HEAD");
  const LossAndGrads g = loss_and_grads(model, std::span(&ex, 1));
  EXPECT_LT(g.loss, 1e-20);
  EXPECT_LT(g.output_grads.squared_norm(), 1e-40);
}

TEST(LossTest, InitialLossIsLogK) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 14);
  std::vector<PreparedExample> batch;
  for (const Mention &m : t.mentions) batch.push_back(prepare_example(model, m.text, m.code));
  EXPECT_NEAR(loss_and_grads(model, batch).loss, std::log(3.0), 1e-12);
}

TEST(LossTest, Errors) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 15);
  EXPECT_EQ(error_code_of([&] { loss_and_grads(model, {}); }), ErrorCode::kEmptyTraining);
  const PreparedExample unlabeled = prepare_example(model, "nausea");
  EXPECT_EQ(error_code_of([&] { loss_and_grads(model, std::span(&unlabeled, 1)); }), ErrorCode::kUnknownCode);
}

TEST(TrainTest, SeparableTwoClassToy) {
  TerminologyDictionary dict;
  dict.add("A", "alpha");
  dict.add("B", "beta");
  std::vector<Mention> mentions;
  const std::vector<std::string> fillers = {"the", "a", "some", "my", "very"};
  for (int i = 0; i < 20; ++i) {
    const bool a = i % 2 == 0;
    mentions.push_back({i, fillers[i % 5] + (a ? " alpha " : " beta ") + fillers[(i / 2) % 5], a ? "A" : "B", {}, {}});
  }
  const std::vector<std::string> vocab = {"alpha", "beta", "the", "a", "some", "my", "very"};
  SplitMix64 rng(1);
  std::vector<double> data;
  for (std::size_t i = 0; i < vocab.size() * 4; ++i) data.push_back(rng.normal());
  auto emb = std::make_shared<const EmbeddingTable>(vocab, data, 4);
  TrainConfig tc;
  tc.epochs = 50;
  tc.batch_size = 4;
  tc.learning_rate = 0.05;
  const TrainResult r = train(mentions, dict, emb, small_config(false), tc);
  ASSERT_EQ(r.loss_trace.size(), 50u);
  EXPECT_NEAR(r.loss_trace.front(), std::log(2.0), 0.2);
  std::size_t correct = 0;
  for (const Mention &m : mentions) {
    const Prediction p = predict(r.model, m.text);
    correct += p.code == m.code;
    // predict agrees with a brute-force argmax over forward().
    const Eigen::VectorXd probs = forward(r.model, m.text);
    int best = 0;
    for (int c = 1; c < probs.size(); ++c) {
      if (probs[c] > probs[best]) best = c;
    }
    EXPECT_EQ(p.code, r.model.code_order()[best]);
  }
  EXPECT_EQ(correct, mentions.size());
}

TEST(TrainTest, DeterministicPerSeed) {
  const Toy t = toy();
  TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 2;
  tc.seed = 3;
  const TrainResult a = train(t.mentions, t.dictionary, t.embeddings, small_config(true), tc);
  const TrainResult b = train(t.mentions, t.dictionary, t.embeddings, small_config(true), tc);
  EXPECT_EQ(a.model.encoder(), b.model.encoder());
  EXPECT_EQ(a.model.output(), b.model.output());
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  tc.seed = 4;
  const TrainResult c = train(t.mentions, t.dictionary, t.embeddings, small_config(true), tc);
  EXPECT_NE(a.model.output(), c.model.output());
}

TEST(TrainTest, SgdReducesLoss) {
  const Toy t = toy();
  TrainConfig tc;
  tc.epochs = 20;
  tc.batch_size = 3;
  tc.learning_rate = 0.1;
  tc.optimizer = OptimizerKind::kSgd;
  const TrainResult r = train(t.mentions, t.dictionary, t.embeddings, small_config(false), tc);
  EXPECT_LT(r.loss_trace.back(), r.loss_trace.front());
}

TEST(TrainTest, ClippingKeepsTrainingFinite) {
  const Toy t = toy();
  TrainConfig tc;
  tc.epochs = 3;
  tc.learning_rate = 0.5;
  tc.clip_norm = 0.1;
  const TrainResult r = train(t.mentions, t.dictionary, t.embeddings, small_config(true), tc);
  EXPECT_TRUE(r.model.encoder().params().all_finite());
  EXPECT_TRUE(r.model.output().all_finite());
}

TEST(TrainTest, BadConfig) {
  const Toy t = toy();
  TrainConfig tc;
  tc.epochs = 0;
  EXPECT_EQ(error_code_of([&] { train(t.mentions, t.dictionary, t.embeddings, small_config(false), tc); }),
            ErrorCode::kBadConfig);
  tc = TrainConfig{};
  tc.learning_rate = -1.0;
  EXPECT_EQ(error_code_of([&] { validate(tc); }), ErrorCode::kBadConfig);
  tc = TrainConfig{};
  tc.clip_norm = 0.0;
  EXPECT_EQ(error_code_of([&] { validate(tc); }), ErrorCode::kBadConfig);
  EXPECT_EQ(error_code_of([&] { train({}, t.dictionary, t.embeddings, small_config(false), TrainConfig{}); }),
            ErrorCode::kEmptyTraining);
}

TEST(TrainTest, NonFiniteInputsAreReported) {
  Toy t = toy();
  std::vector<double> data(t.embeddings->size() * 4, 0.5);
  data[0] = std::numeric_limits<double>::quiet_NaN();
  const std::vector<std::string> tokens(t.embeddings->tokens().begin(), t.embeddings->tokens().end());
  t.embeddings = std::make_shared<const EmbeddingTable>(tokens, data, 4);
  TrainConfig tc;
  tc.epochs = 2;
  EXPECT_EQ(error_code_of([&] { train(t.mentions, t.dictionary, t.embeddings, small_config(true), tc); }),
            ErrorCode::kNonFiniteLoss);
}

class ContainerTest : public ::testing::TestWithParam<std::tuple<CellKind, bool>> {};

TEST_P(ContainerTest, RoundTripIsBitwise) {
  const auto [cell, sim] = GetParam();
  const Toy t = toy();
  JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(sim, cell), 16);
  randomize(model.output(), 17);
  testing::TempDir dir;
  save_model(model, dir / "m.mcnorm");
  const JointModel back = load_model(dir / "m.mcnorm", t.embeddings);
  EXPECT_EQ(back.encoder(), model.encoder());
  EXPECT_EQ(back.output(), model.output());
  EXPECT_EQ(back.tfidf(), model.tfidf());
  EXPECT_EQ(back.config().use_sim_features, sim);
  EXPECT_EQ(serialize_model(back), serialize_model(model));
  SplitMix64 rng(18);
  const std::vector<std::string> words = {"dry", "mouth", "bad", "nausea", "zzz", "headache", "sick"};
  for (int i = 0; i < 100; ++i) {
    std::string text;
    for (std::uint64_t j = 0; j < rng.uniform_int(5); ++j) text += words[rng.uniform_int(words.size())] + " ";
    EXPECT_TRUE(bitwise_equal(forward(model, text), forward(back, text))) << text;
  }
}

INSTANTIATE_TEST_SUITE_P(Variants, ContainerTest,
                         ::testing::Combine(::testing::Values(CellKind::kGru, CellKind::kLstm),
                                            ::testing::Bool()));

TEST(ContainerTest, CorruptionIsRejected) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 19);
  const std::string bytes = serialize_model(model);
  auto code_for = [&](std::string_view data) {
    return error_code_of([&] { deserialize_model(data, t.embeddings); });
  };
  EXPECT_EQ(code_for(bytes.substr(0, bytes.size() - 1)), ErrorCode::kCorruptContainer);
  EXPECT_EQ(code_for(bytes.substr(0, 10)), ErrorCode::kCorruptContainer);
  std::string magic = bytes;
  magic[3] = '?';
  EXPECT_EQ(code_for(magic), ErrorCode::kCorruptContainer);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  EXPECT_EQ(code_for(flipped), ErrorCode::kCorruptContainer);

  testing::TempDir dir;
  testing::write_file(dir / "trunc.mcnorm", bytes.substr(0, bytes.size() / 2));
  EXPECT_EQ(error_code_of([&] { load_model(dir / "trunc.mcnorm", t.embeddings); }), ErrorCode::kCorruptContainer);
  EXPECT_EQ(error_code_of([&] { load_model(dir / "absent.mcnorm", t.embeddings); }), ErrorCode::kMissingFile);
}

TEST(ContainerTest, EmbeddingDimensionMustMatch) {
  const Toy t = toy(4);
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(false), 20);
  const Toy other = toy(5);
  EXPECT_EQ(error_code_of([&] { deserialize_model(serialize_model(model), other.embeddings); }),
            ErrorCode::kShapeMismatch);
}

TEST(ContainerTest, SimFlagChangesContainer) {
  const Toy t = toy();
  const JointModel with = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 21);
  const JointModel without = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(false), 21);
  EXPECT_EQ(deserialize_model(serialize_model(with), t.embeddings).sim_dim(), 3);
  EXPECT_EQ(deserialize_model(serialize_model(without), t.embeddings).sim_dim(), 0);
  // The ablation shares the encoder initialization.
  EXPECT_EQ(with.encoder(), without.encoder());
}

TEST(JointModelTest, ConstructorChecks) {
  const Toy t = toy();
  const JointModel model = make_joint_model(t.mentions, t.dictionary, t.embeddings, small_config(true), 22);
  auto tfidf = std::make_shared<const TfIdfModel>(model.tfidf());
  EXPECT_EQ(error_code_of([&] {
              JointModel(small_config(false), model.encoder(), {"B", "A"}, tfidf, nullptr, t.embeddings);
            }),
            ErrorCode::kBadSpec);
  EXPECT_EQ(error_code_of([&] {
              JointModel(small_config(false), model.encoder(), {"A"}, tfidf, nullptr, t.embeddings);
            }),
            ErrorCode::kBadSpec);
  EXPECT_EQ(error_code_of([&] {
              JointModel(small_config(true), model.encoder(), {"A", "B"}, tfidf, nullptr, t.embeddings);
            }),
            ErrorCode::kShapeMismatch);
}

}  // namespace
}  // namespace mcnorm
