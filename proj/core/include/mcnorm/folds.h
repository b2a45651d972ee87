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

#ifndef MCNORM_FOLDS_H_
#define MCNORM_FOLDS_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mcnorm/corpus.h"

namespace mcnorm {

enum class FoldKind { kRandom, kCustom, kImported };

const char *fold_kind_name(FoldKind kind);  // "random", "custom", "imported"
FoldKind parse_fold_kind(std::string_view name);  // throws BadConfig

// A partition of mention ids into k folds. Ids within a fold are sorted.
//
// Random: the folds cover every id and `dropped_ids` is empty.
// Custom: folds plus `dropped_ids` (normalized-text duplicates) cover every
//   id, and no normalized text occurs in two folds.
// Imported: read from a fold file. `train_only_ids` are used for training in
//   every split but never tested, which lets an official train/test split be
//   expressed as k = 1.
struct FoldAssignment {
  FoldKind kind = FoldKind::kRandom;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<MentionId>> folds;
  std::vector<MentionId> dropped_ids;
  std::vector<MentionId> train_only_ids;
};

// Seeded shuffle of all ids dealt round-robin; fold sizes differ by <= 1.
// Throws BadK for k < 2 and TooFewExamples when |dataset| < k.
FoldAssignment random_kfolds(const Dataset &dataset, int k, std::uint64_t seed);

// Duplicate-free, per-code folds:
//  1. among mentions with equal normalize_text(), keep the lowest id and
//     record the others in dropped_ids;
//  2. group survivors by code;
//  3. shuffle each group with a seed derived from (seed, code) and deal it
//     round-robin, starting where the previous group (in code order) ended;
//  4. merge the per-code folds.
// Throws BadK for k < 2.
FoldAssignment custom_kfolds(const Dataset &dataset, int k, std::uint64_t seed);

struct TrainTestSplit {
  std::vector<MentionId> train;
  std::vector<MentionId> test;
};

// test = folds[test_fold]; train = all other folds plus train_only_ids.
// Throws BadFoldIndex.
TrainTestSplit train_test_split(const FoldAssignment &folds, int test_fold);

// Throws InconsistentFolds unless every fold id exists in the dataset, no id
// is listed twice, and folds, dropped and train-only ids cover the dataset.
void validate_folds(const FoldAssignment &folds, const Dataset &dataset);

// Fold file: `# kind=<kind> k=<k> seed=<seed>` header, then one
// `mention_id<TAB>fold_index` line per mention. Train-only ids use fold
// index -1; dropped ids are omitted.
void write_fold_file(const FoldAssignment &folds, const std::filesystem::path &path);

// Reads a fold file. Ids absent from the file become dropped_ids. Without a
// header the kind is Imported and k = 1 + max fold index.
FoldAssignment read_fold_file(const std::filesystem::path &path, const Dataset &dataset);

}  // namespace mcnorm

#endif  // MCNORM_FOLDS_H_
