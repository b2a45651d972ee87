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

#ifndef MCNORM_OPTIMIZER_H_
#define MCNORM_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mcnorm {

enum class OptimizerKind { kAdam, kSgd };

const char *optimizer_name(OptimizerKind kind);  // "adam", "sgd"
OptimizerKind parse_optimizer(std::string_view name);  // throws BadConfig

// Adam with bias correction (Kingma & Ba).
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grads);
  std::int64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

class Sgd {
 public:
  explicit Sgd(double learning_rate) : lr_(learning_rate) {}
  void step(std::span<double> params, std::span<const double> grads);

 private:
  double lr_;
};

}  // namespace mcnorm

#endif  // MCNORM_OPTIMIZER_H_
