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

#ifndef MCNORM_ERROR_H_
#define MCNORM_ERROR_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mcnorm {

enum class ErrorCode {
  kMissingFile,
  kMalformedLine,
  kEmptyDataset,
  kEmptyDictionary,
  kTooFewExamples,
  kBadK,
  kBadFoldIndex,
  kEmptyTraining,
  kEmptyCorpus,
  kUnknownCode,
  kDimensionMismatch,
  kEmptyEmbeddings,
  kBadDimensions,
  kEmptySequence,
  kNonFiniteLoss,
  kCorruptContainer,
  kShapeMismatch,
  kLengthMismatch,
  kEmptyInput,
  kInconsistentFolds,
  kBadSpec,
  kBadConfig,
  kIoError,
};

// Stable CamelCase name of an error code, e.g. "MalformedLine".
const char *error_code_name(ErrorCode code);

// All library failures are reported as mcnorm::Error. The message is
// prefixed with the code name; `line()` is set for file-format errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const { return code_; }
  std::optional<std::size_t> line() const { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace mcnorm

#endif  // MCNORM_ERROR_H_
