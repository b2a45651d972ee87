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

#ifndef MCNORM_GRADCHECK_H_
#define MCNORM_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "mcnorm/params.h"

namespace mcnorm {

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |a - n| / max(|a|, |n|, abs_floor); below the floor
  // it degrades to an absolute comparison.
  double abs_floor = 1e-6;
};

struct BlockCheck {
  std::string name;
  double max_rel_error = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<BlockCheck> blocks;
  double max_rel_error = 0.0;
  bool pass = true;

  // Names of failing blocks.
  std::vector<std::string> failed_blocks() const;
};

double relative_error(double analytic, double numeric, double abs_floor);

// Compares `analytic` (same layout as `params`) against central differences
// of `loss`. `params` is perturbed in place and restored.
GradCheckReport check_gradients(ParamSet &params, const std::function<double()> &loss,
                                const ParamSet &analytic, const GradCheckOptions &options = {});

}  // namespace mcnorm

#endif  // MCNORM_GRADCHECK_H_
