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

#include "mcnorm/embeddings.h"

#include <charconv>
#include <fstream>

#include "mcnorm/error.h"
#include "mcnorm/text.h"

namespace mcnorm {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T &out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, std::vector<double> vectors, int dim)
    : dim_(dim) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyEmbeddings, "no vectors");
  if (dim < 1 || vectors.size() != tokens.size() * static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "vector data does not match tokens x dim");
  }
  tokens_.reserve(tokens.size());
  data_.reserve(vectors.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!index_.emplace(tokens[i], tokens_.size()).second) continue;
    tokens_.push_back(std::move(tokens[i]));
    data_.insert(data_.end(), vectors.begin() + i * dim, vectors.begin() + (i + 1) * dim);
  }
  unk_.assign(dim, 0.0);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    for (int j = 0; j < dim; ++j) unk_[j] += data_[i * dim + j];
  }
  for (double &x : unk_) x /= static_cast<double>(tokens_.size());
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

std::span<const double> EmbeddingTable::lookup(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return unk_;
  return row(it->second);
}

EmbeddingTable load_embeddings(const std::filesystem::path &path, std::optional<int> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) throw Error(ErrorCode::kMissingFile, path.string());

  std::optional<int> dim = expected_dim;
  std::vector<std::string> tokens;
  std::vector<double> data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;

    if (line_no == 1 && fields.size() == 2) {
      long long count = 0;
      int header_dim = 0;
      if (parse_number(fields[0], count) && parse_number(fields[1], header_dim)) {
        if (header_dim < 1 || (dim && *dim != header_dim)) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "header dimension " + std::to_string(header_dim), line_no);
        }
        dim = header_dim;
        continue;
      }
    }
    const int n = static_cast<int>(fields.size()) - 1;
    if (!dim) {
      if (n < 1) throw Error(ErrorCode::kDimensionMismatch, "row has no values", line_no);
      dim = n;
    }
    if (n != *dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "expected " + std::to_string(*dim) + " values, got " + std::to_string(n), line_no);
    }
    tokens.emplace_back(fields[0]);
    for (int j = 1; j <= n; ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v)) {
        throw Error(ErrorCode::kMalformedLine, "bad number '" + std::string(fields[j]) + "'", line_no);
      }
      data.push_back(v);
    }
  }
  if (tokens.empty()) throw Error(ErrorCode::kEmptyEmbeddings, path.string());
  return EmbeddingTable(std::move(tokens), std::move(data), *dim);
}

void write_embeddings(const EmbeddingTable &table, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    for (double v : table.row(i)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace mcnorm
