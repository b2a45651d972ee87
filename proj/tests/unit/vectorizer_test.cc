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

#include <cmath>

#include <gtest/gtest.h>

#include "mcnorm/error.h"
#include "mcnorm/rng.h"
#include "mcnorm/text.h"
#include "oracles.h"
#include "test_util.h"

namespace mcnorm {
namespace {

using Docs = std::vector<std::vector<std::string>>;

double weight_of(const TfIdfModel &model, const SparseVector &v, const std::string &token) {
  const auto idx = model.index_of(token);
  if (!idx) return 0.0;
  for (const auto &[i, w] : v.entries) {
    if (i == *idx) return w;
  }
  return 0.0;
}

TEST(FitTfIdfTest, SingleDocument) {
  const Docs docs = {{"a", "b"}};
  const TfIdfModel model = fit_tfidf(docs);
  EXPECT_EQ(model.vocabulary_size(), 2u);
  EXPECT_DOUBLE_EQ(model.idf()[0], 1.0);
  EXPECT_DOUBLE_EQ(model.idf()[1], 1.0);
}

TEST(FitTfIdfTest, HandComputedIdf) {
  const Docs docs = {{"a"}, {"a"}, {"b"}};
  const TfIdfModel model = fit_tfidf(docs);
  // ln(4/3) + 1 and ln(4/2) + 1, evaluated independently.
  EXPECT_NEAR(model.idf()[*model.index_of("a")], 1.2876820724517808, 1e-15);
  EXPECT_NEAR(model.idf()[*model.index_of("b")], 1.6931471805599454, 1e-15);
  EXPECT_EQ(model.doc_count(), 3u);
}

TEST(FitTfIdfTest, RefitIsIdentical) {
  const Docs docs = {{"x", "y", "x"}, {"z"}, {"y", "w"}};
  EXPECT_EQ(fit_tfidf(docs), fit_tfidf(docs));
}

TEST(FitTfIdfTest, EmptyCorpus) {
  EXPECT_EQ(testing::error_code_of([] { fit_tfidf(Docs{}); }), ErrorCode::kEmptyCorpus);
  EXPECT_EQ(testing::error_code_of([] { fit_tfidf(Docs{{}, {}}); }), ErrorCode::kEmptyCorpus);
}

TEST(VectorizeTest, RepeatedTokenNormalizesToOne) {
  const TfIdfModel model = fit_tfidf(Docs{{"a", "b"}});
  const std::vector<std::string> tokens = {"a", "a"};
  const SparseVector v = vectorize(model, tokens);
  ASSERT_EQ(v.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(v.entries[0].second, 1.0);
}

TEST(VectorizeTest, AllOovIsZero) {
  const TfIdfModel model = fit_tfidf(Docs{{"a", "b"}});
  const std::vector<std::string> tokens = {"q", "r"};
  const SparseVector v = vectorize(model, tokens);
  EXPECT_TRUE(v.entries.empty());
  EXPECT_EQ(v.norm, 0.0);
}

TEST(VectorizeTest, WeightsProportionalToIdf) {
  const TfIdfModel model = fit_tfidf(Docs{{"a"}, {"a"}, {"b"}});
  const std::vector<std::string> tokens = {"a", "b"};
  const SparseVector v = vectorize(model, tokens);
  // idf / ||idf|| from the hand-computed values above.
  EXPECT_NEAR(weight_of(model, v, "a"), 0.6053485081062916, 1e-15);
  EXPECT_NEAR(weight_of(model, v, "b"), 0.7959605415681652, 1e-15);
  EXPECT_NEAR(v.norm, 1.0, 1e-15);
}

TEST(VectorizeTest, MatchesDenseOracle) {
  SplitMix64 rng(3);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g"};
  for (int trial = 0; trial < 30; ++trial) {
    Docs docs(1 + rng.uniform_int(6));
    for (auto &doc : docs) {
      doc.resize(1 + rng.uniform_int(5));
      for (auto &t : doc) t = words[rng.uniform_int(words.size())];
    }
    const TfIdfModel model = fit_tfidf(docs);
    const testing::DenseTfIdfOracle oracle(docs);
    std::vector<std::string> query(1 + rng.uniform_int(6));
    for (auto &t : query) t = words[rng.uniform_int(words.size())];
    const SparseVector v = vectorize(model, query);
    const std::vector<double> dense = oracle.dense(query);
    double norm = 0.0;
    for (double x : dense) norm += x * x;
    norm = std::sqrt(norm);
    std::size_t i = 0;
    for (const auto &[token, idf] : oracle.idf) {
      const double expected = norm > 0 ? dense[i] / norm : 0.0;
      EXPECT_NEAR(weight_of(model, v, token), expected, 1e-12);
      ++i;
    }
  }
}

TEST(CosineTest, Examples) {
  const TfIdfModel model = fit_tfidf(Docs{{"x"}, {"y"}});
  const std::vector<std::string> xy = {"x", "y"}, x = {"x"}, y = {"y"};
  const SparseVector u = vectorize(model, xy);
  EXPECT_NEAR(cosine(u, u), 1.0, 1e-15);
  EXPECT_EQ(cosine(vectorize(model, x), vectorize(model, y)), 0.0);
  EXPECT_NEAR(cosine(u, vectorize(model, x)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(cosine(SparseVector{}, u), 0.0);
}

TerminologyDictionary toy_dictionary() {
  TerminologyDictionary dict;
  dict.add("C1", "lack of libido");
  dict.add("C1", "no sex drive");
  dict.add("C2", "xerostomia");
  dict.add("C2", "dry mouth");
  return dict;
}

TfIdfModel toy_model(const TerminologyDictionary &dict, const std::vector<std::string> &mentions) {
  Docs docs;
  for (const auto &m : mentions) docs.push_back(tokenize(m));
  for (const auto &entry : dict.entries()) {
    for (const auto &t : entry.terms) docs.push_back(tokenize(t));
  }
  return fit_tfidf(docs);
}

TEST(TfIdfMaxTest, ExactSynonymScoresOne) {
  const TerminologyDictionary dict = toy_dictionary();
  const TfIdfModel model = toy_model(dict, {"dry mouth"});
  const std::vector<std::string> order = {"C1", "C2"};
  const SimilarityFeatures f = tfidf_max_features("Dry Mouth", dict, model, order);
  EXPECT_EQ(f.code_order, order);
  EXPECT_NEAR(f.values[1], 1.0, 1e-15);
  EXPECT_EQ(f.values[0], 0.0);
}

TEST(TfIdfMaxTest, ToyDictionaryMatchesPairwiseLoop) {
  const TerminologyDictionary dict = toy_dictionary();
  const TfIdfModel model = toy_model(dict, {"no sexual drive"});
  const std::vector<std::string> order = {"C1", "C2"};
  const SimilarityFeatures f = tfidf_max_features("no sexual drive", dict, model, order);
  const SparseVector mv = vectorize(model, tokenize("no sexual drive"));
  for (std::size_t c = 0; c < order.size(); ++c) {
    double best = 0.0;
    for (const auto &term : dict.terms(order[c])) best = std::max(best, cosine(mv, vectorize(model, tokenize(term))));
    EXPECT_EQ(f.values[c], best);
  }
  EXPECT_GT(f.values[0], 0.0);
  EXPECT_EQ(f.values[1], 0.0);
}

TEST(TfIdfMaxTest, RespectsCodeOrder) {
  const TerminologyDictionary dict = toy_dictionary();
  const TfIdfModel model = toy_model(dict, {});
  const std::vector<std::string> fwd = {"C1", "C2"}, rev = {"C2", "C1"};
  const auto a = tfidf_max_features("dry mouth drive", dict, model, fwd).values;
  const auto b = tfidf_max_features("dry mouth drive", dict, model, rev).values;
  EXPECT_EQ(a[0], b[1]);
  EXPECT_EQ(a[1], b[0]);
}

TEST(TfIdfMaxTest, TermPermutationInvariant) {
  TerminologyDictionary a, b;
  a.add("C1", "lack of libido");
  a.add("C1", "no sex drive");
  b.add("C1", "no sex drive");
  b.add("C1", "lack of libido");
  const TfIdfModel model = toy_model(a, {"sex drive lacking"});
  const std::vector<std::string> order = {"C1"};
  EXPECT_EQ(tfidf_max_features("sex drive lacking", a, model, order).values,
            tfidf_max_features("sex drive lacking", b, model, order).values);
}

TEST(TfIdfMaxTest, AddingTermNeverLowersFeature) {
  TerminologyDictionary small = toy_dictionary();
  TerminologyDictionary big = toy_dictionary();
  big.add("C2", "mouth feels dry");
  const TfIdfModel model = toy_model(big, {"my mouth is dry"});
  const std::vector<std::string> order = {"C1", "C2"};
  const auto before = tfidf_max_features("my mouth is dry", small, model, order).values;
  const auto after = tfidf_max_features("my mouth is dry", big, model, order).values;
  for (std::size_t c = 0; c < order.size(); ++c) EXPECT_GE(after[c], before[c]);
}

TEST(TfIdfMaxTest, ValuesInUnitInterval) {
  SplitMix64 rng(4);
  const TerminologyDictionary dict = toy_dictionary();
  const std::vector<std::string> words = {"dry", "mouth", "no", "sex", "drive", "of", "pain", "xerostomia"};
  std::vector<std::string> mentions;
  for (int i = 0; i < 50; ++i) {
    std::string m;
    for (std::uint64_t j = 0; j <= rng.uniform_int(4); ++j) m += words[rng.uniform_int(words.size())] + " ";
    mentions.push_back(m);
  }
  const TfIdfModel model = toy_model(dict, mentions);
  const SimilarityIndex index(dict, model, {"C1", "C2"});
  for (const auto &m : mentions) {
    for (double v : index.features(m).values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(SimilarityIndexTest, UnknownCode) {
  const TerminologyDictionary dict = toy_dictionary();
  const TfIdfModel model = toy_model(dict, {});
  EXPECT_EQ(testing::error_code_of([&] { SimilarityIndex(dict, model, {"C1", "C9"}); }),
            ErrorCode::kUnknownCode);
}

}  // namespace
}  // namespace mcnorm
