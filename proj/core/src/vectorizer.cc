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

#include "mcnorm/vectorizer.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "mcnorm/error.h"
#include "mcnorm/text.h"

namespace mcnorm {

TfIdfModel::TfIdfModel(std::vector<std::string> tokens, std::vector<double> idf,
                       std::size_t doc_count)
    : tokens_(std::move(tokens)), idf_(std::move(idf)), doc_count_(doc_count) {
  if (tokens_.size() != idf_.size()) {
    throw Error(ErrorCode::kBadSpec, "vocabulary and idf sizes differ");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!(std::isfinite(idf_[i]) && idf_[i] > 0.0)) {
      throw Error(ErrorCode::kBadSpec, "idf of '" + tokens_[i] + "' is not positive");
    }
    if (!index_.emplace(tokens_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorCode::kBadSpec, "duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

std::optional<std::uint32_t> TfIdfModel::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TfIdfModel fit_tfidf(std::span<const std::vector<std::string>> docs) {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::size_t> column;
  std::vector<std::size_t> df;
  for (const auto &doc : docs) {
    std::vector<std::size_t> seen;
    for (const std::string &token : doc) {
      auto [it, inserted] = column.emplace(token, tokens.size());
      if (inserted) {
        tokens.push_back(token);
        df.push_back(0);
      }
      seen.push_back(it->second);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::size_t c : seen) ++df[c];
  }
  if (tokens.empty()) throw Error(ErrorCode::kEmptyCorpus, "no tokens to fit");

  const double n = static_cast<double>(docs.size());
  std::vector<double> idf(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }
  return TfIdfModel(std::move(tokens), std::move(idf), docs.size());
}

SparseVector vectorize(const TfIdfModel &model, std::span<const std::string> tokens) {
  std::map<std::uint32_t, double> counts;
  for (const std::string &token : tokens) {
    if (const auto idx = model.index_of(token)) counts[*idx] += 1.0;
  }
  SparseVector out;
  if (counts.empty()) return out;

  out.entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto &[idx, count] : counts) {
    const double w = count * model.idf()[idx];
    out.entries.emplace_back(idx, w);
    sq += w * w;
  }
  const double scale = 1.0 / std::sqrt(sq);
  sq = 0.0;
  for (auto &entry : out.entries) {
    entry.second *= scale;
    sq += entry.second * entry.second;
  }
  out.norm = std::sqrt(sq);
  return out;
}

double cosine(const SparseVector &u, const SparseVector &v) {
  if (u.norm == 0.0 || v.norm == 0.0) return 0.0;
  double dot = 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return std::clamp(dot / (u.norm * v.norm), 0.0, 1.0);
}

SimilarityIndex::SimilarityIndex(const TerminologyDictionary &dictionary, TfIdfModel model,
                                 std::vector<std::string> code_order)
    : model_(std::move(model)), code_order_(std::move(code_order)) {
  terms_.reserve(code_order_.size());
  term_vectors_.reserve(code_order_.size());
  for (const std::string &code : code_order_) {
    const auto &terms = dictionary.terms(code);
    terms_.push_back(terms);
    auto &vectors = term_vectors_.emplace_back();
    vectors.reserve(terms.size());
    for (const std::string &term : terms) vectors.push_back(vectorize(model_, tokenize(term)));
  }
}

std::vector<double> SimilarityIndex::feature_values(std::span<const std::string> mention_tokens) const {
  const SparseVector mention = vectorize(model_, mention_tokens);
  std::vector<double> values(code_order_.size(), 0.0);
  for (std::size_t c = 0; c < term_vectors_.size(); ++c) {
    double best = 0.0;
    for (const SparseVector &term : term_vectors_[c]) best = std::max(best, cosine(mention, term));
    values[c] = best;
  }
  return values;
}

SimilarityFeatures SimilarityIndex::features(std::string_view mention_text) const {
  return SimilarityFeatures{feature_values(tokenize(mention_text)), code_order_};
}

SimilarityFeatures tfidf_max_features(std::string_view mention_text,
                                      const TerminologyDictionary &dictionary,
                                      const TfIdfModel &model,
                                      std::span<const std::string> code_order) {
  const SimilarityIndex index(dictionary, model,
                              std::vector<std::string>(code_order.begin(), code_order.end()));
  return index.features(mention_text);
}

}  // namespace mcnorm
