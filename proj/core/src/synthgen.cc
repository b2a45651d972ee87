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

#include "mcnorm/synthgen.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>

#include "mcnorm/error.h"
#include "mcnorm/rng.h"
#include "mcnorm/text.h"

namespace mcnorm {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::array<const char *, 12> kFillers = {"a",    "bit",  "of",   "really", "my",   "the",
                                                   "some", "very", "kind", "so",     "felt", "little"};
constexpr int kMaxAttempts = 200;

std::string pseudo_word(SplitMix64 &rng) {
  const int syllables = 2 + static_cast<int>(rng.uniform_int(2));
  std::string w;
  for (int i = 0; i < syllables; ++i) {
    w.push_back(kConsonants[rng.uniform_int(kConsonants.size())]);
    w.push_back(kVowels[rng.uniform_int(kVowels.size())]);
  }
  return w;
}

std::string join(const std::vector<std::string> &tokens) {
  std::string out;
  for (const std::string &t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string code_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%04d", i);
  return buf;
}

void check_spec(const SynthSpec &spec) {
  if (spec.n_codes < 2) throw Error(ErrorCode::kBadSpec, "n_codes must be >= 2");
  if (spec.synonyms_per_code < 1) throw Error(ErrorCode::kBadSpec, "synonyms_per_code must be >= 1");
  if (spec.mentions_per_code < 1) throw Error(ErrorCode::kBadSpec, "mentions_per_code must be >= 1");
  if (spec.pool_size < 2) throw Error(ErrorCode::kBadSpec, "pool_size must be >= 2");
  if (!(spec.duplicate_rate >= 0.0 && spec.duplicate_rate <= 1.0)) {
    throw Error(ErrorCode::kBadSpec, "duplicate_rate must be in [0, 1]");
  }
}

// One paraphrase of a synonym: optionally swap in another pool word, then
// apply each enabled noise op with probability 0.3.
std::vector<std::string> paraphrase(const std::vector<std::string> &synonym,
                                    const std::vector<std::string> &pool, const SynthSpec &spec,
                                    SplitMix64 &rng) {
  std::vector<std::string> tokens = synonym;
  std::size_t pool_tokens = tokens.size();
  if (rng.uniform() < 0.5) tokens[rng.uniform_int(tokens.size())] = pool[rng.uniform_int(pool.size())];
  if (spec.noise_ops.contains(NoiseOp::kTokenDrop) && pool_tokens > 1 && rng.uniform() < 0.3) {
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(rng.uniform_int(tokens.size())));
    --pool_tokens;
  }
  if (spec.noise_ops.contains(NoiseOp::kTokenSwap) && tokens.size() > 1 && rng.uniform() < 0.3) {
    const std::size_t i = rng.uniform_int(tokens.size() - 1);
    std::swap(tokens[i], tokens[i + 1]);
  }
  if (spec.noise_ops.contains(NoiseOp::kFillerInsert) && rng.uniform() < 0.3) {
    const std::size_t at = rng.uniform_int(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), kFillers[rng.uniform_int(kFillers.size())]);
  }
  return tokens;
}

}  // namespace

SynthCorpus generate(const SynthSpec &spec) {
  check_spec(spec);
  SplitMix64 rng(spec.seed);
  TerminologyDictionary dictionary("synthetic");
  std::unordered_set<std::string> used_words(kFillers.begin(), kFillers.end());
  std::unordered_set<std::string> used_texts;

  struct Draft {
    std::string text;
    std::string code;
  };
  std::vector<Draft> drafts;

  for (int c = 0; c < spec.n_codes; ++c) {
    const std::string code = code_name(c);
    std::vector<std::string> pool;
    while (static_cast<int>(pool.size()) < spec.pool_size) {
      std::string w = pseudo_word(rng);
      if (used_words.insert(w).second) pool.push_back(std::move(w));
    }

    // Deal the shuffled pool over the synonyms so every pool word occurs in
    // the dictionary, then pad each synonym to at least two words.
    std::vector<std::string> dealt = pool;
    rng.shuffle(std::span(dealt));
    std::vector<std::vector<std::string>> synonyms(spec.synonyms_per_code);
    for (std::size_t i = 0; i < dealt.size(); ++i) synonyms[i % synonyms.size()].push_back(dealt[i]);
    for (auto &syn : synonyms) {
      while (syn.size() < 2 || (syn.size() < 3 && rng.uniform() < 0.3)) {
        std::string extra = pool[rng.uniform_int(pool.size())];
        if (std::find(syn.begin(), syn.end(), extra) == syn.end()) syn.push_back(std::move(extra));
      }
      dictionary.add(code, join(syn));
    }

    const int n_dup = std::min(spec.mentions_per_code - 1,
                               static_cast<int>(std::floor(spec.duplicate_rate * spec.mentions_per_code)));
    const int n_orig = spec.mentions_per_code - n_dup;
    const std::size_t first = drafts.size();
    for (int m = 0; m < n_orig; ++m) {
      std::string text;
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxAttempts) {
          throw Error(ErrorCode::kBadSpec, "cannot draw " + std::to_string(n_orig) +
                                               " distinct mentions for " + code + "; enlarge pool_size");
        }
        std::vector<std::string> tokens =
            paraphrase(synonyms[rng.uniform_int(synonyms.size())], pool, spec, rng);
        if (attempt >= kMaxAttempts / 2) tokens.push_back(pool[rng.uniform_int(pool.size())]);
        text = join(tokens);
        if (rng.uniform() < 0.2) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
        if (used_texts.insert(normalize_text(text)).second) break;
      }
      drafts.push_back(Draft{std::move(text), code});
    }
    for (int m = 0; m < n_dup; ++m) {
      const std::size_t source = first + rng.uniform_int(static_cast<std::uint64_t>(n_orig));
      drafts.push_back(drafts[source]);
    }
  }

  rng.shuffle(std::span(drafts));
  std::vector<Mention> mentions;
  mentions.reserve(drafts.size());
  for (auto &d : drafts) {
    Mention m;
    m.id = static_cast<MentionId>(mentions.size());
    m.text = std::move(d.text);
    m.code = std::move(d.code);
    mentions.push_back(std::move(m));
  }
  return SynthCorpus{Dataset(std::move(mentions)), std::move(dictionary)};
}

EmbeddingTable generate_embeddings(const TerminologyDictionary &dictionary, int dim, std::uint64_t seed,
                                   double noise_scale) {
  if (dim < 2) throw Error(ErrorCode::kBadDimensions, "embedding dim must be >= 2");
  SplitMix64 rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::string> tokens;
  std::vector<double> data;
  std::unordered_set<std::string> seen;
  std::vector<double> centroid(dim);
  for (const auto &entry : dictionary.entries()) {
    for (double &x : centroid) x = sd * rng.normal();
    for (const std::string &term : entry.terms) {
      for (std::string &token : tokenize(term)) {
        if (!seen.insert(token).second) continue;
        for (int j = 0; j < dim; ++j) data.push_back(centroid[j] + noise_scale * sd * rng.normal());
        tokens.push_back(std::move(token));
      }
    }
  }
  if (tokens.empty()) throw Error(ErrorCode::kEmptyEmbeddings, "dictionary has no tokens");
  return EmbeddingTable(std::move(tokens), std::move(data), dim);
}

}  // namespace mcnorm
