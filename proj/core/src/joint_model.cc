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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <variant>

#include <spdlog/spdlog.h>

#include "mcnorm/error.h"
#include "mcnorm/rng.h"
#include "mcnorm/text.h"

namespace mcnorm {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd softmax(const VectorXd &z) {
  const Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

double log_sum_exp(const VectorXd &z) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

VectorXd features(const JointModel &model, const VectorXd &representation, const VectorXd &sim) {
  VectorXd f(model.feature_dim());
  f.head(representation.size()) = representation;
  if (model.sim_dim() > 0) f.tail(model.sim_dim()) = sim;
  return f;
}

LossAndGrads batch_loss_and_grads(const JointModel &model, std::span<const PreparedExample> examples,
                                  std::span<const std::size_t> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyTraining, "empty batch");
  LossAndGrads out{0.0, model.encoder().params().zeros_like(), model.output().zeros_like()};
  const auto W = model.output().matrix(JointModel::kOutW);
  const auto b = model.output().vector(JointModel::kOutB);
  auto gW = out.output_grads.matrix(JointModel::kOutW);
  auto gb = out.output_grads.vector(JointModel::kOutB);
  const Eigen::Index rep_dim = model.encoder().output_dim();

  for (std::size_t idx : batch) {
    const PreparedExample &ex = examples[idx];
    if (ex.label < 0 || ex.label >= model.num_classes()) {
      throw Error(ErrorCode::kUnknownCode, "training example has no label in code_order");
    }
    const EncoderTrace trace = encode_traced(model.encoder(), ex.inputs);
    const VectorXd f = features(model, trace.encoded.representation, ex.sim);
    const VectorXd z = W.transpose() * f + b;
    out.loss += log_sum_exp(z) - z[ex.label];

    VectorXd dz = softmax(z);
    dz[ex.label] -= 1.0;
    gW.noalias() += f * dz.transpose();
    gb += dz;
    const VectorXd d_rep = W.topRows(rep_dim) * dz;
    accumulate_encoder_gradients(model.encoder(), ex.inputs, trace, d_rep, out.encoder_grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  out.encoder_grads.scale(inv);
  out.output_grads.scale(inv);
  return out;
}

class Optimizer {
 public:
  Optimizer(const TrainConfig &config, std::size_t size) {
    if (config.optimizer == OptimizerKind::kAdam) {
      impl_.emplace<Adam>(size, config.learning_rate);
    } else {
      impl_.emplace<Sgd>(config.learning_rate);
    }
  }
  void step(std::span<double> params, std::span<const double> grads) {
    std::visit(
        [&](auto &opt) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(opt)>, std::monostate>) {
            opt.step(params, grads);
          }
        },
        impl_);
  }

 private:
  std::variant<std::monostate, Adam, Sgd> impl_;
};

}  // namespace

void validate(const TrainConfig &config) {
  if (config.epochs < 1) throw Error(ErrorCode::kBadConfig, "epochs must be >= 1");
  if (config.batch_size < 1) throw Error(ErrorCode::kBadConfig, "batch_size must be >= 1");
  if (!(config.learning_rate > 0.0)) throw Error(ErrorCode::kBadConfig, "learning_rate must be > 0");
  if (config.clip_norm && !(*config.clip_norm > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "clip_norm must be > 0");
  }
}

JointModel::JointModel(ModelConfig config, EncoderParams encoder, std::vector<std::string> code_order,
                       std::shared_ptr<const TfIdfModel> tfidf,
                       std::shared_ptr<const SimilarityIndex> similarity,
                       std::shared_ptr<const EmbeddingTable> embeddings)
    : config_(config),
      encoder_(std::move(encoder)),
      code_order_(std::move(code_order)),
      tfidf_(std::move(tfidf)),
      similarity_(std::move(similarity)),
      embeddings_(std::move(embeddings)) {
  if (code_order_.size() < 2) {
    throw Error(ErrorCode::kBadSpec, "a classifier needs at least 2 concept codes");
  }
  if (!std::is_sorted(code_order_.begin(), code_order_.end()) ||
      std::adjacent_find(code_order_.begin(), code_order_.end()) != code_order_.end()) {
    throw Error(ErrorCode::kBadSpec, "code_order must be sorted and unique");
  }
  if (!tfidf_ || !embeddings_) throw Error(ErrorCode::kBadSpec, "missing tf-idf model or embeddings");
  if (encoder_.input_dim() != embeddings_->dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "encoder input dim " + std::to_string(encoder_.input_dim()) +
                    " != embedding dim " + std::to_string(embeddings_->dim()));
  }
  if (encoder_.cell_kind() != config_.cell_kind || encoder_.hidden() != config_.hidden ||
      encoder_.attention() != config_.attention) {
    throw Error(ErrorCode::kShapeMismatch, "encoder shape does not match the model config");
  }
  if (config_.use_sim_features) {
    if (!similarity_ || !std::equal(similarity_->code_order().begin(), similarity_->code_order().end(),
                                    code_order_.begin(), code_order_.end())) {
      throw Error(ErrorCode::kShapeMismatch, "similarity index must cover code_order");
    }
  } else {
    similarity_.reset();
  }
  output_.add("out.W", feature_dim(), num_classes());
  output_.add("out.b", num_classes(), 1);
}

std::optional<int> JointModel::code_index(std::string_view code) const {
  const auto it = std::lower_bound(code_order_.begin(), code_order_.end(), code);
  if (it == code_order_.end() || *it != code) return std::nullopt;
  return static_cast<int>(it - code_order_.begin());
}

PreparedExample prepare_example(const JointModel &model, std::string_view text, std::string_view code) {
  const std::vector<std::string> tokens = tokenize(text);
  const EmbeddingTable &emb = model.embeddings();
  PreparedExample ex;
  if (tokens.empty()) {
    ex.inputs = Eigen::Map<const VectorXd>(emb.unk_vector().data(), emb.dim());
  } else {
    ex.inputs.resize(emb.dim(), static_cast<Eigen::Index>(tokens.size()));
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const auto v = emb.lookup(tokens[t]);
      ex.inputs.col(static_cast<Eigen::Index>(t)) = Eigen::Map<const VectorXd>(v.data(), emb.dim());
    }
  }
  if (model.similarity() != nullptr) {
    const std::vector<double> sim = model.similarity()->feature_values(tokens);
    ex.sim = Eigen::Map<const VectorXd>(sim.data(), static_cast<Eigen::Index>(sim.size()));
  }
  if (!code.empty()) ex.label = model.code_index(code).value_or(-1);
  return ex;
}

VectorXd logits(const JointModel &model, const PreparedExample &example) {
  const EncodedMention enc = encode(model.encoder(), example.inputs);
  const VectorXd f = features(model, enc.representation, example.sim);
  return model.output().matrix(JointModel::kOutW).transpose() * f +
         model.output().vector(JointModel::kOutB);
}

VectorXd forward(const JointModel &model, const PreparedExample &example) {
  return softmax(logits(model, example));
}

VectorXd forward(const JointModel &model, std::string_view mention_text) {
  return forward(model, prepare_example(model, mention_text));
}

int argmax(const VectorXd &values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

Prediction predict(const JointModel &model, std::string_view mention_text) {
  const VectorXd z = logits(model, prepare_example(model, mention_text));
  const int k = argmax(z);
  return Prediction{std::string(model.code_order()[k]), softmax(z)[k]};
}

LossAndGrads loss_and_grads(const JointModel &model, std::span<const PreparedExample> batch) {
  std::vector<std::size_t> all(batch.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return batch_loss_and_grads(model, batch, all);
}

JointModel make_joint_model(std::span<const Mention> train, const TerminologyDictionary &dictionary,
                            std::shared_ptr<const EmbeddingTable> embeddings, const ModelConfig &config,
                            std::uint64_t seed) {
  if (train.empty()) throw Error(ErrorCode::kEmptyTraining, "no training mentions");
  if (!embeddings) throw Error(ErrorCode::kBadSpec, "embeddings are required");

  std::vector<std::string> code_order;
  for (const Mention &m : train) code_order.push_back(m.code);
  std::sort(code_order.begin(), code_order.end());
  code_order.erase(std::unique(code_order.begin(), code_order.end()), code_order.end());

  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  for (const Mention &m : train) docs.push_back(tokenize(m.text));
  for (const auto &entry : dictionary.entries()) {
    for (const std::string &term : entry.terms) docs.push_back(tokenize(term));
  }
  auto tfidf = std::make_shared<const TfIdfModel>(fit_tfidf(docs));
  std::shared_ptr<const SimilarityIndex> similarity;
  if (config.use_sim_features) {
    similarity = std::make_shared<const SimilarityIndex>(dictionary, *tfidf, code_order);
  }
  EncoderParams encoder = init_params(config.cell_kind, embeddings->dim(), config.hidden,
                                      config.attention, mix_seed(seed, 1));
  return JointModel(config, std::move(encoder), std::move(code_order), std::move(tfidf),
                    std::move(similarity), std::move(embeddings));
}

TrainResult train(std::span<const Mention> train_set, const TerminologyDictionary &dictionary,
                  std::shared_ptr<const EmbeddingTable> embeddings, const ModelConfig &model_config,
                  const TrainConfig &train_config) {
  validate(train_config);
  TrainResult result{make_joint_model(train_set, dictionary, std::move(embeddings), model_config,
                                      train_config.seed),
                     {}};
  JointModel &model = result.model;

  std::vector<PreparedExample> examples;
  examples.reserve(train_set.size());
  for (const Mention &m : train_set) examples.push_back(prepare_example(model, m.text, m.code));

  Optimizer enc_opt(train_config, model.encoder().params().size());
  Optimizer out_opt(train_config, model.output().size());
  SplitMix64 rng(mix_seed(train_config.seed, 2));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch_size = static_cast<std::size_t>(train_config.batch_size);

  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    if (train_config.shuffle_each_epoch) rng.shuffle(std::span(order));
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t n = std::min(batch_size, order.size() - start);
      LossAndGrads lg = batch_loss_and_grads(model, examples, std::span(order).subspan(start, n));
      if (!std::isfinite(lg.loss) || !lg.encoder_grads.all_finite() || !lg.output_grads.all_finite()) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "epoch " + std::to_string(epoch) + ", batch starting at " + std::to_string(start) +
                        ": loss " + std::to_string(lg.loss));
      }
      if (train_config.clip_norm) {
        const double norm = std::sqrt(lg.encoder_grads.squared_norm() + lg.output_grads.squared_norm());
        if (norm > *train_config.clip_norm) {
          const double s = *train_config.clip_norm / norm;
          lg.encoder_grads.scale(s);
          lg.output_grads.scale(s);
        }
      }
      enc_opt.step(model.encoder().params().values(), lg.encoder_grads.values());
      out_opt.step(model.output().values(), lg.output_grads.values());
      if (!model.encoder().params().all_finite() || !model.output().all_finite()) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "parameters became non-finite in epoch " + std::to_string(epoch));
      }
      total += lg.loss * static_cast<double>(n);
    }
    result.loss_trace.push_back(total / static_cast<double>(examples.size()));
    spdlog::debug("epoch {} loss {:.6f}", epoch, result.loss_trace.back());
  }
  return result;
}

}  // namespace mcnorm
