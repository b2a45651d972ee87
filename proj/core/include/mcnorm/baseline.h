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

#ifndef MCNORM_BASELINE_H_
#define MCNORM_BASELINE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "mcnorm/corpus.h"

namespace mcnorm {

// Exact-match lexicon: normalized training text -> concept code.
class LexiconIndex {
 public:
  explicit LexiconIndex(std::unordered_map<std::string, std::string> table)
      : table_(std::move(table)) {}

  const std::unordered_map<std::string, std::string> &table() const { return table_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
};

// Each normalized text maps to its most frequent training code; ties go to
// the lexicographically smallest code. Throws EmptyTraining.
LexiconIndex build_lexicon(std::span<const Mention> train);

// Code for normalize_text(text), or nullopt when the text was never seen.
std::optional<std::string> baseline_predict(const LexiconIndex &lexicon, std::string_view text);

}  // namespace mcnorm

#endif  // MCNORM_BASELINE_H_
