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

#ifndef MCNORM_EMBEDDINGS_H_
#define MCNORM_EMBEDDINGS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mcnorm {

// Frozen pretrained word vectors. Unknown tokens map to `unk_vector`, the
// arithmetic mean of all stored vectors.
class EmbeddingTable {
 public:
  // `vectors` is row-major, tokens.size() x dim. Repeated tokens keep their
  // first vector. Throws EmptyEmbeddings or DimensionMismatch.
  EmbeddingTable(std::vector<std::string> tokens, std::vector<double> vectors, int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  std::span<const std::string> tokens() const { return tokens_; }
  std::span<const double> unk_vector() const { return unk_; }
  bool contains(std::string_view token) const;

  // Stored vector, or unk_vector() for out-of-vocabulary tokens.
  std::span<const double> lookup(std::string_view token) const;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * dim_, dim_);
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<double> data_;
  std::vector<double> unk_;
  int dim_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Word-per-line text format: optional `count dim` header, then
// `token v1 ... v_dim`. Throws MissingFile, DimensionMismatch(line) or
// EmptyEmbeddings.
EmbeddingTable load_embeddings(const std::filesystem::path &path,
                               std::optional<int> expected_dim = std::nullopt);

// Writes the header and one row per token using shortest round-trip
// decimal formatting.
void write_embeddings(const EmbeddingTable &table, const std::filesystem::path &path);

}  // namespace mcnorm

#endif  // MCNORM_EMBEDDINGS_H_
