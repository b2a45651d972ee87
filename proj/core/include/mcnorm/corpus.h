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

#ifndef MCNORM_CORPUS_H_
#define MCNORM_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mcnorm {

using MentionId = std::int64_t;

enum class EntityKind {
  kAdr,
  kDrug,
  kDisease,
  kSymptom,
  kFinding,
  kWithdrawal,
  kIndication,
  kSsi,
  kOther,
};

const char *entity_kind_name(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view name);

// A free-text health-related phrase with its gold concept code.
struct Mention {
  MentionId id = 0;
  std::string text;
  std::string code;
  std::optional<std::string> doc_id;
  std::optional<EntityKind> entity_kind;
};

// An ordered, non-empty collection of mentions with unique ids. Immutable
// after construction.
class Dataset {
 public:
  // Throws EmptyDataset for no mentions and BadSpec for blank text, blank
  // code or a repeated id.
  explicit Dataset(std::vector<Mention> mentions);

  std::span<const Mention> mentions() const { return mentions_; }
  std::size_t size() const { return mentions_.size(); }
  const std::set<std::string> &label_set() const { return label_set_; }

  bool contains(MentionId id) const { return index_.contains(id); }
  // Throws BadSpec when the id is unknown.
  const Mention &at(MentionId id) const;

  std::vector<MentionId> ids() const;
  std::vector<Mention> select(std::span<const MentionId> ids) const;

 private:
  std::vector<Mention> mentions_;
  std::set<std::string> label_set_;
  std::unordered_map<MentionId, std::size_t> index_;
};

// Concept code -> synonym terms. Codes keep first-seen order; terms are
// distinct per code after normalize_text().
class TerminologyDictionary {
 public:
  struct Entry {
    std::string code;
    std::vector<std::string> terms;
  };

  TerminologyDictionary() = default;
  explicit TerminologyDictionary(std::string name) : name_(std::move(name)) {}

  // Adds a term, ignoring it when an equal normalized term already exists
  // for the code. Returns true when the term was stored.
  bool add(std::string_view code, std::string_view term);

  const std::string &name() const { return name_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::string_view code) const;
  // Throws UnknownCode.
  const std::vector<std::string> &terms(std::string_view code) const;

 private:
  std::string name_;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Reads `text<TAB>code[<TAB>doc_id[<TAB>entity_kind]]` lines; `#` lines and
// blank lines are skipped. Ids are assigned in file order from 0.
Dataset load_dataset(const std::filesystem::path &path);

// Reads `code<TAB>term` lines.
TerminologyDictionary load_terminology(const std::filesystem::path &path,
                                       std::string name = {});

void write_dataset(const Dataset &dataset, const std::filesystem::path &path);
void write_terminology(const TerminologyDictionary &dictionary,
                       const std::filesystem::path &path);

struct DatasetStats {
  std::size_t mentions = 0;
  std::size_t unique_texts = 0;  // after normalize_text()
  std::size_t unique_codes = 0;
  std::map<std::string, std::size_t> per_code;

  bool operator==(const DatasetStats &) const = default;
};

DatasetStats dataset_stats(const Dataset &dataset);

}  // namespace mcnorm

#endif  // MCNORM_CORPUS_H_
