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

#include <benchmark/benchmark.h>

#include "mcnorm/encoder.h"
#include "mcnorm/rng.h"

namespace mcnorm {
namespace {

Eigen::MatrixXd random_inputs(int d, int t) {
  SplitMix64 rng(1);
  Eigen::MatrixXd x(d, t);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

// Args: hidden units, sequence length. Input dim 32, attention 16.
void BM_Encode(benchmark::State &state, CellKind cell) {
  const int h = static_cast<int>(state.range(0));
  const int t = static_cast<int>(state.range(1));
  const EncoderParams params = init_params(cell, 32, h, 16, 0);
  const Eigen::MatrixXd x = random_inputs(32, t);
  for (auto _ : state) benchmark::DoNotOptimize(encode(params, x));
  state.SetItemsProcessed(state.iterations() * t);
}

void BM_EncodeBackward(benchmark::State &state, CellKind cell) {
  const int h = static_cast<int>(state.range(0));
  const int t = static_cast<int>(state.range(1));
  const EncoderParams params = init_params(cell, 32, h, 16, 0);
  const Eigen::MatrixXd x = random_inputs(32, t);
  const Eigen::VectorXd upstream = Eigen::VectorXd::Ones(2 * h);
  for (auto _ : state) benchmark::DoNotOptimize(encode_backward(params, x, upstream));
  state.SetItemsProcessed(state.iterations() * t);
}

BENCHMARK_CAPTURE(BM_Encode, gru, CellKind::kGru)->ArgsProduct({{32, 128}, {4, 16}});
BENCHMARK_CAPTURE(BM_Encode, lstm, CellKind::kLstm)->ArgsProduct({{32, 128}, {4, 16}});
BENCHMARK_CAPTURE(BM_EncodeBackward, gru, CellKind::kGru)->ArgsProduct({{32, 128}, {4, 16}});
BENCHMARK_CAPTURE(BM_EncodeBackward, lstm, CellKind::kLstm)->ArgsProduct({{32, 128}, {4, 16}});

}  // namespace
}  // namespace mcnorm

BENCHMARK_MAIN();
