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

#ifndef MCNORM_PARAMS_H_
#define MCNORM_PARAMS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace mcnorm {

struct ParamBlock {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
};

// Named matrices stored in one flat buffer (column-major per block). The
// flat view is what optimizers, gradient checks and serialization use.
// Maps returned by matrix() are invalidated by add().
class ParamSet {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  // Appends a zero-initialized block; returns its index.
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols);

  std::size_t num_blocks() const { return blocks_.size(); }
  const ParamBlock &block(std::size_t i) const { return blocks_[i]; }
  std::span<const ParamBlock> blocks() const { return blocks_; }
  std::optional<std::size_t> find(std::string_view name) const;

  MatrixMap matrix(std::size_t i);
  ConstMatrixMap matrix(std::size_t i) const;
  VectorMap vector(std::size_t i);
  ConstVectorMap vector(std::size_t i) const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> values(std::size_t i) { return values().subspan(blocks_[i].offset, blocks_[i].size()); }
  std::span<const double> values(std::size_t i) const {
    return values().subspan(blocks_[i].offset, blocks_[i].size());
  }
  std::size_t size() const { return data_.size(); }

  void set_zero();
  bool all_finite() const;
  bool same_layout(const ParamSet &other) const;
  ParamSet zeros_like() const;

  // this += scale * other. Layouts must match.
  void add_scaled(const ParamSet &other, double scale);
  void scale(double factor);
  double squared_norm() const;

  bool operator==(const ParamSet &other) const {
    return same_layout(other) && data_ == other.data_;
  }

 private:
  std::vector<ParamBlock> blocks_;
  std::vector<double> data_;
};

}  // namespace mcnorm

#endif  // MCNORM_PARAMS_H_
