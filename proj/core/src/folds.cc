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

#include "mcnorm/folds.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "mcnorm/error.h"
#include "mcnorm/rng.h"
#include "mcnorm/text.h"

namespace mcnorm {
namespace {

void check_k(int k) {
  if (k < 2) throw Error(ErrorCode::kBadK, "k must be >= 2, got " + std::to_string(k));
}

template <typename T>
bool parse_int(std::string_view s, T &out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

const char *fold_kind_name(FoldKind kind) {
  switch (kind) {
    case FoldKind::kRandom: return "random";
    case FoldKind::kCustom: return "custom";
    case FoldKind::kImported: return "imported";
  }
  return "imported";
}

FoldKind parse_fold_kind(std::string_view name) {
  if (name == "random") return FoldKind::kRandom;
  if (name == "custom") return FoldKind::kCustom;
  if (name == "imported") return FoldKind::kImported;
  throw Error(ErrorCode::kBadConfig, "unknown fold kind '" + std::string(name) + "'");
}

FoldAssignment random_kfolds(const Dataset &dataset, int k, std::uint64_t seed) {
  check_k(k);
  if (dataset.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewExamples,
                std::to_string(dataset.size()) + " mentions for k=" + std::to_string(k));
  }
  std::vector<MentionId> ids = dataset.ids();
  SplitMix64 rng(seed);
  rng.shuffle(std::span<MentionId>(ids));

  FoldAssignment out{FoldKind::kRandom, k, seed, std::vector<std::vector<MentionId>>(k), {}, {}};
  for (std::size_t i = 0; i < ids.size(); ++i) out.folds[i % k].push_back(ids[i]);
  for (auto &fold : out.folds) std::sort(fold.begin(), fold.end());
  return out;
}

FoldAssignment custom_kfolds(const Dataset &dataset, int k, std::uint64_t seed) {
  check_k(k);
  FoldAssignment out{FoldKind::kCustom, k, seed, std::vector<std::vector<MentionId>>(k), {}, {}};

  // Dedup on normalized text; the lowest id wins regardless of file order.
  std::vector<const Mention *> by_id;
  for (const Mention &m : dataset.mentions()) by_id.push_back(&m);
  std::sort(by_id.begin(), by_id.end(),
            [](const Mention *a, const Mention *b) { return a->id < b->id; });

  std::unordered_map<std::string, const Mention *> winners;
  // code -> (normalized text, id) of surviving mentions
  std::map<std::string, std::vector<std::pair<std::string, MentionId>>> groups;
  for (const Mention *m : by_id) {
    std::string key = normalize_text(m->text);
    auto [it, inserted] = winners.emplace(key, m);
    if (!inserted) {
      if (it->second->code != m->code) {
        spdlog::warn("mention {} ('{}') duplicates mention {} with a different code ({} vs {}); "
                     "keeping the lower id",
                     m->id, m->text, it->second->id, m->code, it->second->code);
      }
      out.dropped_ids.push_back(m->id);
      continue;
    }
    groups[m->code].emplace_back(std::move(key), m->id);
  }

  std::size_t offset = 0;
  for (auto &[code, members] : groups) {
    // Sorting by text first makes the result independent of input order.
    std::sort(members.begin(), members.end());
    SplitMix64 rng(mix_seed(seed, fnv1a64(code)));
    rng.shuffle(std::span(members));
    for (std::size_t i = 0; i < members.size(); ++i) {
      out.folds[(offset + i) % k].push_back(members[i].second);
    }
    offset = (offset + members.size()) % k;
  }
  for (auto &fold : out.folds) std::sort(fold.begin(), fold.end());
  std::sort(out.dropped_ids.begin(), out.dropped_ids.end());
  return out;
}

TrainTestSplit train_test_split(const FoldAssignment &folds, int test_fold) {
  if (test_fold < 0 || test_fold >= static_cast<int>(folds.folds.size())) {
    throw Error(ErrorCode::kBadFoldIndex,
                std::to_string(test_fold) + " not in [0, " +
                    std::to_string(folds.folds.size()) + ")");
  }
  TrainTestSplit split;
  split.test = folds.folds[test_fold];
  for (int i = 0; i < static_cast<int>(folds.folds.size()); ++i) {
    if (i == test_fold) continue;
    split.train.insert(split.train.end(), folds.folds[i].begin(), folds.folds[i].end());
  }
  split.train.insert(split.train.end(), folds.train_only_ids.begin(), folds.train_only_ids.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

void validate_folds(const FoldAssignment &folds, const Dataset &dataset) {
  if (folds.k != static_cast<int>(folds.folds.size()) || folds.k < 1) {
    throw Error(ErrorCode::kInconsistentFolds, "k does not match the number of folds");
  }
  std::unordered_set<MentionId> seen;
  auto visit = [&](MentionId id) {
    if (!dataset.contains(id)) {
      throw Error(ErrorCode::kInconsistentFolds, "unknown mention id " + std::to_string(id));
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kInconsistentFolds, "mention id " + std::to_string(id) + " listed twice");
    }
  };
  for (const auto &fold : folds.folds) {
    for (MentionId id : fold) visit(id);
  }
  for (MentionId id : folds.dropped_ids) visit(id);
  for (MentionId id : folds.train_only_ids) visit(id);
  if (seen.size() != dataset.size()) {
    throw Error(ErrorCode::kInconsistentFolds,
                std::to_string(dataset.size() - seen.size()) + " mentions not assigned");
  }
}

void write_fold_file(const FoldAssignment &folds, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "# kind=" << fold_kind_name(folds.kind) << " k=" << folds.k << " seed=" << folds.seed
      << '\n';
  std::vector<std::pair<MentionId, int>> rows;
  for (int f = 0; f < static_cast<int>(folds.folds.size()); ++f) {
    for (MentionId id : folds.folds[f]) rows.emplace_back(id, f);
  }
  for (MentionId id : folds.train_only_ids) rows.emplace_back(id, -1);
  std::sort(rows.begin(), rows.end());
  for (const auto &[id, f] : rows) out << id << '\t' << f << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

FoldAssignment read_fold_file(const std::filesystem::path &path, const Dataset &dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) throw Error(ErrorCode::kMissingFile, path.string());

  FoldAssignment out{FoldKind::kImported, 0, 0, {}, {}, {}};
  std::optional<int> header_k;
  std::map<int, std::vector<MentionId>> by_fold;
  std::unordered_set<MentionId> listed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "kind") {
          out.kind = parse_fold_kind(value);
        } else if (key == "k") {
          int k = 0;
          if (!parse_int(value, k)) throw Error(ErrorCode::kMalformedLine, "bad k", line_no);
          header_k = k;
        } else if (key == "seed") {
          if (!parse_int(value, out.seed)) throw Error(ErrorCode::kMalformedLine, "bad seed", line_no);
        }
      }
      continue;
    }
    const auto tab = line.find('\t');
    MentionId id = 0;
    int fold = 0;
    if (tab == std::string::npos || !parse_int(std::string_view(line).substr(0, tab), id) ||
        !parse_int(std::string_view(line).substr(tab + 1), fold) || fold < -1) {
      throw Error(ErrorCode::kMalformedLine, "expected mention_id<TAB>fold_index", line_no);
    }
    if (!dataset.contains(id)) {
      throw Error(ErrorCode::kInconsistentFolds,
                  "fold file line " + std::to_string(line_no) + " names unknown mention " +
                      std::to_string(id));
    }
    if (!listed.insert(id).second) {
      throw Error(ErrorCode::kInconsistentFolds, "mention " + std::to_string(id) + " listed twice");
    }
    if (fold == -1) {
      out.train_only_ids.push_back(id);
    } else {
      by_fold[fold].push_back(id);
    }
  }

  const int max_fold = by_fold.empty() ? -1 : by_fold.rbegin()->first;
  out.k = header_k.value_or(max_fold + 1);
  if (out.k < 1 || max_fold >= out.k) {
    throw Error(ErrorCode::kInconsistentFolds, "fold indices do not match k in " + path.string());
  }
  out.folds.resize(out.k);
  for (auto &[f, ids] : by_fold) out.folds[f] = std::move(ids);
  for (auto &fold : out.folds) std::sort(fold.begin(), fold.end());
  std::sort(out.train_only_ids.begin(), out.train_only_ids.end());
  for (MentionId id : dataset.ids()) {
    if (!listed.contains(id)) out.dropped_ids.push_back(id);
  }
  std::sort(out.dropped_ids.begin(), out.dropped_ids.end());
  return out;
}

}  // namespace mcnorm
