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

#include "mcnorm/baseline.h"

#include <map>

#include "mcnorm/error.h"
#include "mcnorm/text.h"

namespace mcnorm {

LexiconIndex build_lexicon(std::span<const Mention> train) {
  if (train.empty()) throw Error(ErrorCode::kEmptyTraining, "no training mentions");
  std::unordered_map<std::string, std::map<std::string, std::size_t>> counts;
  for (const Mention &m : train) ++counts[normalize_text(m.text)][m.code];

  std::unordered_map<std::string, std::string> table;
  table.reserve(counts.size());
  for (auto &[text, by_code] : counts) {
    // std::map iterates codes in ascending order, so strict > keeps the
    // smallest code among equally frequent ones.
    const std::string *best = nullptr;
    std::size_t best_count = 0;
    for (const auto &[code, n] : by_code) {
      if (n > best_count) {
        best = &code;
        best_count = n;
      }
    }
    table.emplace(text, *best);
  }
  return LexiconIndex(std::move(table));
}

std::optional<std::string> baseline_predict(const LexiconIndex &lexicon, std::string_view text) {
  const auto it = lexicon.table().find(normalize_text(text));
  if (it == lexicon.table().end()) return std::nullopt;
  return it->second;
}

}  // namespace mcnorm
