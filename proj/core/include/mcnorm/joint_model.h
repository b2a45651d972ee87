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

#ifndef MCNORM_JOINT_MODEL_H_
#define MCNORM_JOINT_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mcnorm/corpus.h"
#include "mcnorm/embeddings.h"
#include "mcnorm/encoder.h"
#include "mcnorm/optimizer.h"
#include "mcnorm/params.h"
#include "mcnorm/vectorizer.h"

namespace mcnorm {

struct ModelConfig {
  CellKind cell_kind = CellKind::kGru;
  int hidden = 128;
  int attention = 64;
  bool use_sim_features = false;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  std::optional<double> clip_norm;  // global gradient-norm clip
  bool shuffle_each_epoch = true;
};

// Throws BadConfig for epochs < 1, batch_size < 1, learning_rate <= 0 or a
// non-positive clip norm.
void validate(const TrainConfig &config);

// Encoder output concatenated with per-code TF-IDF(max) similarities, then
// a softmax layer: p = softmax(W' [encode(x); sim(x)] + b) over code_order.
class JointModel {
 public:
  enum OutputBlock : std::size_t { kOutW, kOutB };

  // Zero output layer. `similarity` is required iff config.use_sim_features
  // and must index exactly `code_order`. Throws ShapeMismatch / BadSpec.
  JointModel(ModelConfig config, EncoderParams encoder, std::vector<std::string> code_order,
             std::shared_ptr<const TfIdfModel> tfidf, std::shared_ptr<const SimilarityIndex> similarity,
             std::shared_ptr<const EmbeddingTable> embeddings);

  const ModelConfig &config() const { return config_; }
  const EncoderParams &encoder() const { return encoder_; }
  EncoderParams &encoder() { return encoder_; }
  // W_o is (2h + sim_dim) x K, b_o is K.
  const ParamSet &output() const { return output_; }
  ParamSet &output() { return output_; }

  std::span<const std::string> code_order() const { return code_order_; }
  std::optional<int> code_index(std::string_view code) const;
  int num_classes() const { return static_cast<int>(code_order_.size()); }
  int sim_dim() const { return config_.use_sim_features ? num_classes() : 0; }
  int feature_dim() const { return encoder_.output_dim() + sim_dim(); }

  const TfIdfModel &tfidf() const { return *tfidf_; }
  const SimilarityIndex *similarity() const { return similarity_.get(); }
  const EmbeddingTable &embeddings() const { return *embeddings_; }
  std::shared_ptr<const EmbeddingTable> embeddings_ptr() const { return embeddings_; }

 private:
  ModelConfig config_;
  EncoderParams encoder_;
  ParamSet output_;
  std::vector<std::string> code_order_;
  std::shared_ptr<const TfIdfModel> tfidf_;
  std::shared_ptr<const SimilarityIndex> similarity_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
};

// A mention turned into encoder inputs and (optional) similarity features.
// label is the index into code_order, or -1 for a code the model never saw.
struct PreparedExample {
  Eigen::MatrixXd inputs;  // d x T; an empty mention becomes one UNK column
  Eigen::VectorXd sim;     // sim_dim
  int label = -1;
};

PreparedExample prepare_example(const JointModel &model, std::string_view text,
                                std::string_view code = {});

Eigen::VectorXd logits(const JointModel &model, const PreparedExample &example);
Eigen::VectorXd forward(const JointModel &model, const PreparedExample &example);
Eigen::VectorXd forward(const JointModel &model, std::string_view mention_text);

// Index of the largest logit; ties go to the lowest index.
int argmax(const Eigen::VectorXd &values);

struct Prediction {
  std::string code;
  double probability = 0.0;
};

Prediction predict(const JointModel &model, std::string_view mention_text);

struct LossAndGrads {
  double loss = 0.0;  // mean cross-entropy over the batch
  ParamSet encoder_grads;
  ParamSet output_grads;
};

// Throws EmptyTraining for an empty batch and UnknownCode for unlabeled
// examples.
LossAndGrads loss_and_grads(const JointModel &model, std::span<const PreparedExample> batch);

// Builds an untrained model: code_order is the sorted label set of `train`,
// TF-IDF is fit on training mentions plus all dictionary terms.
JointModel make_joint_model(std::span<const Mention> train, const TerminologyDictionary &dictionary,
                            std::shared_ptr<const EmbeddingTable> embeddings,
                            const ModelConfig &config, std::uint64_t seed);

struct TrainResult {
  JointModel model;
  std::vector<double> loss_trace;  // mean training loss per epoch
};

// Mini-batch cross-entropy training. Deterministic for a fixed seed.
// Throws EmptyTraining, BadConfig or NonFiniteLoss.
TrainResult train(std::span<const Mention> train_set, const TerminologyDictionary &dictionary,
                  std::shared_ptr<const EmbeddingTable> embeddings, const ModelConfig &model_config,
                  const TrainConfig &train_config);

// Container: "MCNORM1", u32 version, then length-prefixed sections holding
// config, code order, TF-IDF model, similarity terms, embedding dim and the
// parameter blocks as little-endian float64, and a trailing FNV-1a 64
// checksum of all preceding bytes.
inline constexpr std::uint32_t kContainerVersion = 1;

void save_model(const JointModel &model, const std::filesystem::path &path);
std::string serialize_model(const JointModel &model);

// Throws MissingFile, CorruptContainer, or ShapeMismatch (including an
// embedding table whose dim differs from the stored one).
JointModel load_model(const std::filesystem::path &path, std::shared_ptr<const EmbeddingTable> embeddings);
JointModel deserialize_model(std::string_view bytes, std::shared_ptr<const EmbeddingTable> embeddings);

}  // namespace mcnorm

#endif  // MCNORM_JOINT_MODEL_H_
