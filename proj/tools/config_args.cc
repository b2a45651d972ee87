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

#include "config_args.h"

#include <algorithm>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "mcnorm/error.h"

namespace mcnorm::cli {

std::vector<std::string> expand_config(std::vector<std::string> args) {
  if (args.size() < 2) return args;
  std::optional<std::string> path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  if (!std::filesystem::is_regular_file(*path)) throw Error(ErrorCode::kMissingFile, *path);

  const std::string &command = args[1];
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(*path);
  } catch (const CLI::Error &e) {
    throw Error(ErrorCode::kBadConfig, *path + ": " + e.what());
  }
  std::vector<std::string> injected;
  for (const CLI::ConfigItem &item : items) {
    // "++" and "--" mark section boundaries.
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == command)) continue;
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (item.inputs.empty()) {
      injected.push_back("--" + key);
    } else {
      for (const std::string &value : item.inputs) injected.push_back("--" + key + "=" + value);
    }
  }
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

}  // namespace mcnorm::cli
