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

#ifndef MCNORM_TOOLS_CONFIG_ARGS_H_
#define MCNORM_TOOLS_CONFIG_ARGS_H_

#include <string>
#include <vector>

namespace mcnorm::cli {

// Expands `--config FILE` (or `--config=FILE`) into flag tokens inserted
// right after the subcommand at args[1], so flags given on the command line
// come later and win under a take-last policy.
//
// The file holds `key = value` lines. Top-level keys apply to every
// subcommand; keys under a `[name]` section apply only to subcommand
// `name`. Underscores in keys become dashes. Throws mcnorm::Error
// (MissingFile) when the file cannot be read.
std::vector<std::string> expand_config(std::vector<std::string> args);

}  // namespace mcnorm::cli

#endif  // MCNORM_TOOLS_CONFIG_ARGS_H_
