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

#ifndef MCNORM_SYNTHGEN_H_
#define MCNORM_SYNTHGEN_H_

#include <cstdint>
#include <set>

#include "mcnorm/corpus.h"
#include "mcnorm/embeddings.h"

namespace mcnorm {

enum class NoiseOp { kTokenDrop, kTokenSwap, kFillerInsert };

// Shape of a synthetic normalization corpus. Every code owns a private pool
// of pseudo-words; its synonyms are built from the pool and its mentions
// are noisy paraphrases of the synonyms.
struct SynthSpec {
  int n_codes = 20;
  int synonyms_per_code = 3;
  int mentions_per_code = 40;
  double duplicate_rate = 0.0;  // fraction of mentions copied verbatim from earlier ones
  std::set<NoiseOp> noise_ops = {NoiseOp::kTokenDrop, NoiseOp::kTokenSwap, NoiseOp::kFillerInsert};
  std::uint64_t seed = 0;
  int pool_size = 6;  // pseudo-words per code
};

struct SynthCorpus {
  Dataset dataset;
  TerminologyDictionary dictionary;
};

// Pure function of the spec. Non-duplicate mentions have pairwise distinct
// normalized texts. Throws BadSpec.
SynthCorpus generate(const SynthSpec &spec);

// Each code gets a random centroid c ~ N(0, I/d); every token of its terms
// gets c + noise_scale * N(0, I/d). Tokens shared between codes keep the
// vector of the first code. Throws BadDimensions for d < 2.
EmbeddingTable generate_embeddings(const TerminologyDictionary &dictionary, int dim, std::uint64_t seed,
                                   double noise_scale = 0.1);

}  // namespace mcnorm

#endif  // MCNORM_SYNTHGEN_H_
