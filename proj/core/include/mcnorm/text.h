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

#ifndef MCNORM_TEXT_H_
#define MCNORM_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace mcnorm {

// Canonical form used for deduplication, lexicon keys and statistics:
// NFC, lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize_text(std::string_view text);

// NFC, lowercase, then split on maximal runs of non-alphanumeric code
// points. "can't fall asleep" -> {"can", "t", "fall", "asleep"}.
std::vector<std::string> tokenize(std::string_view text);

// ASCII whitespace trim, used for interchange-file fields.
std::string_view trim(std::string_view text);

}  // namespace mcnorm

#endif  // MCNORM_TEXT_H_
