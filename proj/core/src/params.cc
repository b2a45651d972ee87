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

#include "mcnorm/params.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mcnorm {

std::size_t ParamSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  ParamBlock block{std::move(name), rows, cols, data_.size()};
  data_.resize(data_.size() + block.size(), 0.0);
  blocks_.push_back(std::move(block));
  return blocks_.size() - 1;
}

std::optional<std::size_t> ParamSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name == name) return i;
  }
  return std::nullopt;
}

ParamSet::MatrixMap ParamSet::matrix(std::size_t i) {
  const ParamBlock &b = blocks_[i];
  return MatrixMap(data_.data() + b.offset, b.rows, b.cols);
}

ParamSet::ConstMatrixMap ParamSet::matrix(std::size_t i) const {
  const ParamBlock &b = blocks_[i];
  return ConstMatrixMap(data_.data() + b.offset, b.rows, b.cols);
}

ParamSet::VectorMap ParamSet::vector(std::size_t i) {
  const ParamBlock &b = blocks_[i];
  return VectorMap(data_.data() + b.offset, b.rows * b.cols);
}

ParamSet::ConstVectorMap ParamSet::vector(std::size_t i) const {
  const ParamBlock &b = blocks_[i];
  return ConstVectorMap(data_.data() + b.offset, b.rows * b.cols);
}

void ParamSet::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool ParamSet::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

bool ParamSet::same_layout(const ParamSet &other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const ParamBlock &a = blocks_[i];
    const ParamBlock &b = other.blocks_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
  }
  return true;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out = *this;
  out.set_zero();
  return out;
}

void ParamSet::add_scaled(const ParamSet &other, double scale) {
  assert(same_layout(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

void ParamSet::scale(double factor) {
  for (double &x : data_) x *= factor;
}

double ParamSet::squared_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return s;
}

}  // namespace mcnorm
