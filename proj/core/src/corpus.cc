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

#include "mcnorm/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "mcnorm/error.h"
#include "mcnorm/text.h"

namespace mcnorm {
namespace {

constexpr std::array<std::pair<EntityKind, const char *>, 9> kEntityKinds = {{
    {EntityKind::kAdr, "ADR"},
    {EntityKind::kDrug, "Drug"},
    {EntityKind::kDisease, "Disease"},
    {EntityKind::kSymptom, "Symptom"},
    {EntityKind::kFinding, "Finding"},
    {EntityKind::kWithdrawal, "Withdrawal"},
    {EntityKind::kIndication, "Indication"},
    {EntityKind::kSsi, "SSI"},
    {EntityKind::kOther, "Other"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw Error(ErrorCode::kMissingFile, path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

// Strips a trailing CR; true for `#` comments and blank lines. A line
// holding only a tab is an empty-text record, not a blank line.
bool skip_line(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (!line.empty() && line.front() == '#') return true;
  return trim(line).empty() && line.find('\t') == std::string::npos;
}

void check_field(std::string_view field, const char *what) {
  if (field.find_first_of("\t\n\r") != std::string_view::npos) {
    throw Error(ErrorCode::kBadSpec,
                std::string(what) + " contains a tab or newline: " +
                    std::string(field));
  }
}

}  // namespace

const char *entity_kind_name(EntityKind kind) {
  for (const auto &[k, name] : kEntityKinds) {
    if (k == kind) return name;
  }
  return "Other";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  for (const auto &[k, n] : kEntityKinds) {
    if (iequals(name, n)) return k;
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<Mention> mentions) : mentions_(std::move(mentions)) {
  if (mentions_.empty()) throw Error(ErrorCode::kEmptyDataset, "no mentions");
  index_.reserve(mentions_.size());
  for (std::size_t i = 0; i < mentions_.size(); ++i) {
    const Mention &m = mentions_[i];
    if (trim(m.text).empty()) {
      throw Error(ErrorCode::kBadSpec, "mention " + std::to_string(m.id) + " has empty text");
    }
    if (trim(m.code).empty()) {
      throw Error(ErrorCode::kBadSpec, "mention " + std::to_string(m.id) + " has empty code");
    }
    if (!index_.emplace(m.id, i).second) {
      throw Error(ErrorCode::kBadSpec, "duplicate mention id " + std::to_string(m.id));
    }
    label_set_.insert(m.code);
  }
}

const Mention &Dataset::at(MentionId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kBadSpec, "unknown mention id " + std::to_string(id));
  }
  return mentions_[it->second];
}

std::vector<MentionId> Dataset::ids() const {
  std::vector<MentionId> out;
  out.reserve(mentions_.size());
  for (const Mention &m : mentions_) out.push_back(m.id);
  return out;
}

std::vector<Mention> Dataset::select(std::span<const MentionId> ids) const {
  std::vector<Mention> out;
  out.reserve(ids.size());
  for (MentionId id : ids) out.push_back(at(id));
  return out;
}

bool TerminologyDictionary::add(std::string_view code, std::string_view term) {
  auto it = index_.find(code);
  if (it == index_.end()) {
    it = index_.emplace(std::string(code), entries_.size()).first;
    entries_.push_back(Entry{std::string(code), {}});
  }
  Entry &entry = entries_[it->second];
  const std::string key = normalize_text(term);
  for (const std::string &existing : entry.terms) {
    if (normalize_text(existing) == key) return false;
  }
  entry.terms.emplace_back(term);
  return true;
}

bool TerminologyDictionary::contains(std::string_view code) const {
  return index_.find(code) != index_.end();
}

const std::vector<std::string> &TerminologyDictionary::terms(std::string_view code) const {
  const auto it = index_.find(code);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownCode, std::string(code));
  }
  return entries_[it->second].terms;
}

Dataset load_dataset(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  std::vector<Mention> mentions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 4) {
      throw Error(ErrorCode::kMalformedLine,
                  "expected 2-4 tab-separated columns in " + path.string(), line_no);
    }
    const std::string_view text = trim(fields[0]);
    const std::string_view code = trim(fields[1]);
    if (text.empty() || code.empty()) {
      throw Error(ErrorCode::kMalformedLine, "empty text or code in " + path.string(), line_no);
    }
    Mention m;
    m.id = static_cast<MentionId>(mentions.size());
    m.text = std::string(text);
    m.code = std::string(code);
    if (fields.size() >= 3 && !trim(fields[2]).empty()) {
      m.doc_id = std::string(trim(fields[2]));
    }
    if (fields.size() == 4 && !trim(fields[3]).empty()) {
      m.entity_kind = parse_entity_kind(trim(fields[3]));
      if (!m.entity_kind) {
        throw Error(ErrorCode::kMalformedLine,
                    "unknown entity kind '" + std::string(trim(fields[3])) + "'", line_no);
      }
    }
    mentions.push_back(std::move(m));
  }
  if (mentions.empty()) throw Error(ErrorCode::kEmptyDataset, path.string());
  return Dataset(std::move(mentions));
}

TerminologyDictionary load_terminology(const std::filesystem::path &path, std::string name) {
  std::ifstream in = open_input(path);
  TerminologyDictionary dictionary(name.empty() ? path.stem().string() : std::move(name));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw Error(ErrorCode::kMalformedLine,
                  "expected code<TAB>term in " + path.string(), line_no);
    }
    const std::string_view code = trim(fields[0]);
    const std::string_view term = trim(fields[1]);
    if (code.empty() || term.empty()) {
      throw Error(ErrorCode::kMalformedLine, "empty code or term in " + path.string(), line_no);
    }
    dictionary.add(code, term);
  }
  if (dictionary.empty()) throw Error(ErrorCode::kEmptyDictionary, path.string());
  return dictionary;
}

void write_dataset(const Dataset &dataset, const std::filesystem::path &path) {
  std::ofstream out = open_output(path);
  for (const Mention &m : dataset.mentions()) {
    check_field(m.text, "mention text");
    check_field(m.code, "mention code");
    out << m.text << '\t' << m.code;
    if (m.doc_id || m.entity_kind) out << '\t' << m.doc_id.value_or("");
    if (m.entity_kind) out << '\t' << entity_kind_name(*m.entity_kind);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

void write_terminology(const TerminologyDictionary &dictionary,
                       const std::filesystem::path &path) {
  std::ofstream out = open_output(path);
  for (const auto &entry : dictionary.entries()) {
    check_field(entry.code, "concept code");
    for (const std::string &term : entry.terms) {
      check_field(term, "term");
      out << entry.code << '\t' << term << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

DatasetStats dataset_stats(const Dataset &dataset) {
  DatasetStats stats;
  stats.mentions = dataset.size();
  std::unordered_set<std::string> texts;
  for (const Mention &m : dataset.mentions()) {
    texts.insert(normalize_text(m.text));
    ++stats.per_code[m.code];
  }
  stats.unique_texts = texts.size();
  stats.unique_codes = stats.per_code.size();
  return stats;
}

}  // namespace mcnorm
