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

#ifndef MCNORM_ENCODER_H_
#define MCNORM_ENCODER_H_

#include <cstdint>
#include <functional>
#include <string_view>

#include <Eigen/Core>

#include "mcnorm/gradcheck.h"
#include "mcnorm/params.h"

namespace mcnorm {

enum class CellKind { kGru, kLstm };

const char *cell_kind_name(CellKind kind);  // "gru", "lstm"
CellKind parse_cell_kind(std::string_view name);  // throws BadConfig

// Bidirectional recurrent encoder with additive attention.
//
// Each direction stacks its gate weights: W is (G*h x d), U is (G*h x h),
// b is (G*h), with gate order [z, r, n] for GRU (G = 3) and [i, f, o, g]
// for LSTM (G = 4). Attention maps each state s_t = [fwd_t; bwd_t] to
// u_t = v' tanh(W s_t + b) with W (a x 2h), b (a), v (a).
class EncoderParams {
 public:
  enum Block : std::size_t { kFwdW, kFwdU, kFwdB, kBwdW, kBwdU, kBwdB, kAttW, kAttB, kAttV };

  // Zero parameters. Throws BadDimensions unless d, h, a >= 1.
  EncoderParams(CellKind cell_kind, int input_dim, int hidden, int attention);

  CellKind cell_kind() const { return cell_kind_; }
  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  int attention() const { return attention_; }
  int gates() const { return cell_kind_ == CellKind::kGru ? 3 : 4; }
  int output_dim() const { return 2 * hidden_; }

  ParamSet &params() { return params_; }
  const ParamSet &params() const { return params_; }

  bool operator==(const EncoderParams &other) const = default;

 private:
  CellKind cell_kind_;
  int input_dim_;
  int hidden_;
  int attention_;
  ParamSet params_;
};

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)) per gate matrix,
// zero biases, LSTM forget-gate bias 1. Deterministic per seed.
EncoderParams init_params(CellKind cell_kind, int input_dim, int hidden, int attention,
                          std::uint64_t seed);

struct EncodedMention {
  Eigen::VectorXd representation;     // 2h
  Eigen::VectorXd attention_weights;  // one per token, sums to 1
  Eigen::MatrixXd states;             // 2h x T, column t = [fwd_t; bwd_t]
};

// Activations cached by the forward pass for backpropagation.
struct DirectionTrace {
  Eigen::MatrixXd h;       // h x T
  Eigen::MatrixXd h_prev;  // h x T, state entering step t
  Eigen::MatrixXd gates;   // G*h x T, post-activation
  Eigen::MatrixXd c;       // LSTM only
  Eigen::MatrixXd c_prev;  // LSTM only
};

struct EncoderTrace {
  EncodedMention encoded;
  DirectionTrace forward;
  DirectionTrace backward;
  Eigen::MatrixXd attention_hidden;  // a x T, tanh(W s_t + b)
};

// `inputs` is d x T, one embedded token per column. Throws EmptySequence for
// T = 0 and BadDimensions when d does not match.
EncodedMention encode(const EncoderParams &params, const Eigen::MatrixXd &inputs);
EncoderTrace encode_traced(const EncoderParams &params, const Eigen::MatrixXd &inputs);

// Adds d<representation, upstream>/d(params) into `grads`.
void accumulate_encoder_gradients(const EncoderParams &params, const Eigen::MatrixXd &inputs,
                                  const EncoderTrace &trace, const Eigen::VectorXd &upstream,
                                  ParamSet &grads);

// Gradients of <encode(params, inputs).representation, upstream>.
ParamSet encode_backward(const EncoderParams &params, const Eigen::MatrixXd &inputs,
                         const Eigen::VectorXd &upstream);

using EncoderGradientFn = std::function<ParamSet(const EncoderParams &, const Eigen::MatrixXd &,
                                                 const Eigen::VectorXd &)>;

// Checks `analytic` (encode_backward by default) against central
// differences of <representation, upstream>. An empty `upstream` selects a
// fixed pseudo-random direction.
GradCheckReport grad_check(const EncoderParams &params, const Eigen::MatrixXd &inputs,
                           double tolerance, Eigen::VectorXd upstream = {},
                           const EncoderGradientFn &analytic = encode_backward);

}  // namespace mcnorm

#endif  // MCNORM_ENCODER_H_
