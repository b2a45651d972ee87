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

#include "mcnorm/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace mcnorm {

std::vector<std::string> GradCheckReport::failed_blocks() const {
  std::vector<std::string> out;
  for (const BlockCheck &b : blocks) {
    if (!b.pass) out.push_back(b.name);
  }
  return out;
}

double relative_error(double analytic, double numeric, double abs_floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport check_gradients(ParamSet &params, const std::function<double()> &loss,
                                const ParamSet &analytic, const GradCheckOptions &options) {
  GradCheckReport report;
  for (std::size_t b = 0; b < params.num_blocks(); ++b) {
    BlockCheck check{params.block(b).name, 0.0, true};
    auto values = params.values(b);
    const auto grads = analytic.values(b);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + options.epsilon;
      const double plus = loss();
      values[i] = saved - options.epsilon;
      const double minus = loss();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double err = relative_error(grads[i], numeric, options.abs_floor);
      check.max_rel_error = std::max(check.max_rel_error, err);
    }
    check.pass = check.max_rel_error < options.tolerance;
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.pass = report.pass && check.pass;
    report.blocks.push_back(std::move(check));
  }
  return report;
}

}  // namespace mcnorm
