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

#ifndef MCNORM_VECTORIZER_H_
#define MCNORM_VECTORIZER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcnorm/corpus.h"

namespace mcnorm {

// Vocabulary (first-seen order) and smoothed IDF weights
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1,  N = number of documents.
class TfIdfModel {
 public:
  // Throws BadSpec unless every idf is finite and > 0 and tokens are unique.
  TfIdfModel(std::vector<std::string> tokens, std::vector<double> idf, std::size_t doc_count);

  std::span<const std::string> tokens() const { return tokens_; }
  std::span<const double> idf() const { return idf_; }
  std::size_t doc_count() const { return doc_count_; }
  std::size_t vocabulary_size() const { return tokens_.size(); }
  std::optional<std::uint32_t> index_of(std::string_view token) const;

  bool operator==(const TfIdfModel &other) const {
    return tokens_ == other.tokens_ && idf_ == other.idf_ && doc_count_ == other.doc_count_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<double> idf_;
  std::size_t doc_count_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Sorted (index, weight) pairs with non-zero weights.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  double norm = 0.0;
};

// Per-code TF-IDF(max) similarities, aligned with `code_order`.
struct SimilarityFeatures {
  std::vector<double> values;
  std::vector<std::string> code_order;
};

// Throws EmptyCorpus when no document has a token.
TfIdfModel fit_tfidf(std::span<const std::vector<std::string>> docs);

// Raw count x idf for in-vocabulary tokens, L2-normalized. All-OOV input
// gives the zero vector.
SparseVector vectorize(const TfIdfModel &model, std::span<const std::string> tokens);

// Cosine similarity clamped to [0, 1]; 0 when either vector is zero.
double cosine(const SparseVector &u, const SparseVector &v);

// Caches the TF-IDF vector of every synonym term of the indexed codes.
class SimilarityIndex {
 public:
  // Throws UnknownCode if code_order names a code absent from `dictionary`.
  SimilarityIndex(const TerminologyDictionary &dictionary, TfIdfModel model,
                  std::vector<std::string> code_order);

  const TfIdfModel &model() const { return model_; }
  std::span<const std::string> code_order() const { return code_order_; }
  // Terms per code, aligned with code_order().
  std::span<const std::vector<std::string>> terms() const { return terms_; }

  // values[c] = max over terms t of code c of cosine(mention, t).
  SimilarityFeatures features(std::string_view mention_text) const;
  std::vector<double> feature_values(std::span<const std::string> mention_tokens) const;

 private:
  TfIdfModel model_;
  std::vector<std::string> code_order_;
  std::vector<std::vector<std::string>> terms_;
  std::vector<std::vector<SparseVector>> term_vectors_;
};

SimilarityFeatures tfidf_max_features(std::string_view mention_text,
                                      const TerminologyDictionary &dictionary,
                                      const TfIdfModel &model,
                                      std::span<const std::string> code_order);

}  // namespace mcnorm

#endif  // MCNORM_VECTORIZER_H_
