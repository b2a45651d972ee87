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

#include "mcnorm/encoder.h"

#include <cmath>
#include <string>

#include "mcnorm/error.h"
#include "mcnorm/rng.h"

namespace mcnorm {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd sigmoid(const VectorXd &x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

VectorXd tanh_vec(const VectorXd &x) { return x.array().tanh().matrix(); }

void check_inputs(const EncoderParams &params, const MatrixXd &inputs) {
  if (inputs.cols() == 0) throw Error(ErrorCode::kEmptySequence, "encoder input has no tokens");
  if (inputs.rows() != params.input_dim()) {
    throw Error(ErrorCode::kBadDimensions,
                "input rows " + std::to_string(inputs.rows()) + " != d " +
                    std::to_string(params.input_dim()));
  }
}

DirectionTrace run_direction(CellKind kind, ParamSet::ConstMatrixMap W, ParamSet::ConstMatrixMap U,
                             ParamSet::ConstVectorMap b, const MatrixXd &inputs, bool reverse) {
  const Eigen::Index T = inputs.cols();
  const Eigen::Index h = U.cols();
  MatrixXd pre_x = W * inputs;
  pre_x.colwise() += b;

  DirectionTrace tr;
  tr.h.resize(h, T);
  tr.h_prev.resize(h, T);
  tr.gates.resize(U.rows(), T);
  if (kind == CellKind::kLstm) {
    tr.c.resize(h, T);
    tr.c_prev.resize(h, T);
  }
  VectorXd hp = VectorXd::Zero(h);
  VectorXd cp = VectorXd::Zero(h);
  for (Eigen::Index s = 0; s < T; ++s) {
    const Eigen::Index t = reverse ? T - 1 - s : s;
    tr.h_prev.col(t) = hp;
    VectorXd hn;
    if (kind == CellKind::kGru) {
      const VectorXd zr = pre_x.col(t).head(2 * h) + U.topRows(2 * h) * hp;
      const VectorXd z = sigmoid(zr.head(h));
      const VectorXd r = sigmoid(zr.tail(h));
      const VectorXd rh = r.cwiseProduct(hp);
      const VectorXd n = tanh_vec(pre_x.col(t).tail(h) + U.bottomRows(h) * rh);
      hn = (1.0 - z.array()).matrix().cwiseProduct(hp) + z.cwiseProduct(n);
      tr.gates.col(t) << z, r, n;
    } else {
      const VectorXd pre = pre_x.col(t) + U * hp;
      const VectorXd i = sigmoid(pre.segment(0, h));
      const VectorXd f = sigmoid(pre.segment(h, h));
      const VectorXd o = sigmoid(pre.segment(2 * h, h));
      const VectorXd g = tanh_vec(pre.segment(3 * h, h));
      tr.c_prev.col(t) = cp;
      cp = f.cwiseProduct(cp) + i.cwiseProduct(g);
      tr.c.col(t) = cp;
      hn = o.cwiseProduct(tanh_vec(cp));
      tr.gates.col(t) << i, f, o, g;
    }
    tr.h.col(t) = hn;
    hp = std::move(hn);
  }
  return tr;
}

// Backpropagation through time for one direction; `d_states` (h x T) holds
// the loss gradient w.r.t. each emitted state.
void backward_direction(CellKind kind, ParamSet::ConstMatrixMap U, const MatrixXd &inputs,
                        const DirectionTrace &tr, const MatrixXd &d_states, bool reverse,
                        ParamSet::MatrixMap dW, ParamSet::MatrixMap dU, ParamSet::VectorMap db) {
  const Eigen::Index T = inputs.cols();
  const Eigen::Index h = U.cols();
  MatrixXd dpre(U.rows(), T);
  MatrixXd rh;
  if (kind == CellKind::kGru) rh.resize(h, T);

  VectorXd carry_h = VectorXd::Zero(h);
  VectorXd carry_c = VectorXd::Zero(h);
  for (Eigen::Index s = T - 1; s >= 0; --s) {
    const Eigen::Index t = reverse ? T - 1 - s : s;
    const VectorXd dh = d_states.col(t) + carry_h;
    const auto hp = tr.h_prev.col(t);
    if (kind == CellKind::kGru) {
      const auto z = tr.gates.col(t).segment(0, h).array();
      const auto r = tr.gates.col(t).segment(h, h).array();
      const auto n = tr.gates.col(t).segment(2 * h, h).array();
      const VectorXd dpn = (dh.array() * z * (1.0 - n * n)).matrix();
      const VectorXd drh = U.bottomRows(h).transpose() * dpn;
      const VectorXd dz = (dh.array() * (n - hp.array())).matrix();
      const VectorXd dr = (drh.array() * hp.array()).matrix();
      dpre.col(t) << (dz.array() * z * (1.0 - z)).matrix(), (dr.array() * r * (1.0 - r)).matrix(), dpn;
      rh.col(t) = (r * hp.array()).matrix();
      carry_h = (dh.array() * (1.0 - z) + drh.array() * r).matrix() +
                U.topRows(2 * h).transpose() * dpre.col(t).head(2 * h);
    } else {
      const auto i = tr.gates.col(t).segment(0, h).array();
      const auto f = tr.gates.col(t).segment(h, h).array();
      const auto o = tr.gates.col(t).segment(2 * h, h).array();
      const auto g = tr.gates.col(t).segment(3 * h, h).array();
      const Eigen::ArrayXd tc = tr.c.col(t).array().tanh();
      const Eigen::ArrayXd dc = carry_c.array() + dh.array() * o * (1.0 - tc * tc);
      const Eigen::ArrayXd d_o = dh.array() * tc;
      dpre.col(t) << (dc * g * i * (1.0 - i)).matrix(),
          (dc * tr.c_prev.col(t).array() * f * (1.0 - f)).matrix(), (d_o * o * (1.0 - o)).matrix(),
          (dc * i * (1.0 - g * g)).matrix();
      carry_c = (dc * f).matrix();
      carry_h = U.transpose() * dpre.col(t);
    }
  }
  dW.noalias() += dpre * inputs.transpose();
  db += dpre.rowwise().sum();
  if (kind == CellKind::kGru) {
    dU.topRows(2 * h).noalias() += dpre.topRows(2 * h) * tr.h_prev.transpose();
    dU.bottomRows(h).noalias() += dpre.bottomRows(h) * rh.transpose();
  } else {
    dU.noalias() += dpre * tr.h_prev.transpose();
  }
}

double glorot_limit(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

const char *cell_kind_name(CellKind kind) { return kind == CellKind::kGru ? "gru" : "lstm"; }

CellKind parse_cell_kind(std::string_view name) {
  if (name == "gru") return CellKind::kGru;
  if (name == "lstm") return CellKind::kLstm;
  throw Error(ErrorCode::kBadConfig, "unknown cell kind '" + std::string(name) + "'");
}

EncoderParams::EncoderParams(CellKind cell_kind, int input_dim, int hidden, int attention)
    : cell_kind_(cell_kind), input_dim_(input_dim), hidden_(hidden), attention_(attention) {
  if (input_dim < 1 || hidden < 1 || attention < 1) {
    throw Error(ErrorCode::kBadDimensions,
                "d=" + std::to_string(input_dim) + " h=" + std::to_string(hidden) +
                    " a=" + std::to_string(attention));
  }
  const int gh = gates() * hidden;
  for (const char *dir : {"fwd", "bwd"}) {
    params_.add(std::string(dir) + ".W", gh, input_dim);
    params_.add(std::string(dir) + ".U", gh, hidden);
    params_.add(std::string(dir) + ".b", gh, 1);
  }
  params_.add("att.W", attention, 2 * hidden);
  params_.add("att.b", attention, 1);
  params_.add("att.v", attention, 1);
}

EncoderParams init_params(CellKind cell_kind, int input_dim, int hidden, int attention,
                          std::uint64_t seed) {
  EncoderParams p(cell_kind, input_dim, hidden, attention);
  SplitMix64 rng(seed);
  ParamSet &ps = p.params();
  auto fill = [&](std::size_t block, double limit) {
    for (double &x : ps.values(block)) x = rng.uniform(-limit, limit);
  };
  for (std::size_t base : {EncoderParams::kFwdW, EncoderParams::kBwdW}) {
    fill(base, glorot_limit(input_dim, hidden));
    fill(base + 1, glorot_limit(hidden, hidden));
    if (cell_kind == CellKind::kLstm) ps.vector(base + 2).segment(hidden, hidden).setOnes();
  }
  fill(EncoderParams::kAttW, glorot_limit(2 * hidden, attention));
  fill(EncoderParams::kAttV, glorot_limit(attention, 1));
  return p;
}

EncoderTrace encode_traced(const EncoderParams &params, const MatrixXd &inputs) {
  check_inputs(params, inputs);
  const ParamSet &ps = params.params();
  const CellKind kind = params.cell_kind();
  const Eigen::Index h = params.hidden();
  const Eigen::Index T = inputs.cols();

  EncoderTrace tr;
  tr.forward = run_direction(kind, ps.matrix(EncoderParams::kFwdW), ps.matrix(EncoderParams::kFwdU),
                             ps.vector(EncoderParams::kFwdB), inputs, false);
  tr.backward = run_direction(kind, ps.matrix(EncoderParams::kBwdW), ps.matrix(EncoderParams::kBwdU),
                              ps.vector(EncoderParams::kBwdB), inputs, true);

  MatrixXd &states = tr.encoded.states;
  states.resize(2 * h, T);
  states.topRows(h) = tr.forward.h;
  states.bottomRows(h) = tr.backward.h;

  MatrixXd pre = ps.matrix(EncoderParams::kAttW) * states;
  pre.colwise() += ps.vector(EncoderParams::kAttB);
  tr.attention_hidden = pre.array().tanh().matrix();
  const VectorXd scores = tr.attention_hidden.transpose() * ps.vector(EncoderParams::kAttV);

  const Eigen::ArrayXd e = (scores.array() - scores.maxCoeff()).exp();
  tr.encoded.attention_weights = (e / e.sum()).matrix();
  tr.encoded.representation = states * tr.encoded.attention_weights;
  return tr;
}

EncodedMention encode(const EncoderParams &params, const MatrixXd &inputs) {
  return encode_traced(params, inputs).encoded;
}

void accumulate_encoder_gradients(const EncoderParams &params, const MatrixXd &inputs,
                                  const EncoderTrace &trace, const VectorXd &upstream,
                                  ParamSet &grads) {
  check_inputs(params, inputs);
  const ParamSet &ps = params.params();
  const Eigen::Index h = params.hidden();
  const MatrixXd &states = trace.encoded.states;
  const VectorXd &alpha = trace.encoded.attention_weights;
  const MatrixXd &E = trace.attention_hidden;
  const auto v = ps.vector(EncoderParams::kAttV);

  // representation = states * alpha, alpha = softmax(E' v).
  MatrixXd d_states = upstream * alpha.transpose();
  const VectorXd d_alpha = states.transpose() * upstream;
  const VectorXd d_scores = (alpha.array() * (d_alpha.array() - alpha.dot(d_alpha))).matrix();

  grads.vector(EncoderParams::kAttV).noalias() += E * d_scores;
  const MatrixXd d_pre = ((v * d_scores.transpose()).array() * (1.0 - E.array() * E.array())).matrix();
  grads.matrix(EncoderParams::kAttW).noalias() += d_pre * states.transpose();
  grads.vector(EncoderParams::kAttB) += d_pre.rowwise().sum();
  d_states.noalias() += ps.matrix(EncoderParams::kAttW).transpose() * d_pre;

  const CellKind kind = params.cell_kind();
  backward_direction(kind, ps.matrix(EncoderParams::kFwdU), inputs, trace.forward, d_states.topRows(h),
                     false, grads.matrix(EncoderParams::kFwdW), grads.matrix(EncoderParams::kFwdU),
                     grads.vector(EncoderParams::kFwdB));
  backward_direction(kind, ps.matrix(EncoderParams::kBwdU), inputs, trace.backward,
                     d_states.bottomRows(h), true, grads.matrix(EncoderParams::kBwdW),
                     grads.matrix(EncoderParams::kBwdU), grads.vector(EncoderParams::kBwdB));
}

ParamSet encode_backward(const EncoderParams &params, const MatrixXd &inputs, const VectorXd &upstream) {
  const EncoderTrace trace = encode_traced(params, inputs);
  ParamSet grads = params.params().zeros_like();
  accumulate_encoder_gradients(params, inputs, trace, upstream, grads);
  return grads;
}

GradCheckReport grad_check(const EncoderParams &params, const MatrixXd &inputs, double tolerance,
                           VectorXd upstream, const EncoderGradientFn &analytic) {
  if (upstream.size() == 0) {
    SplitMix64 rng(0x9C0FFEEULL);
    upstream.resize(params.output_dim());
    for (Eigen::Index i = 0; i < upstream.size(); ++i) upstream[i] = rng.uniform(-1.0, 1.0);
  }
  const ParamSet grads = analytic(params, inputs, upstream);
  EncoderParams probe = params;
  auto loss = [&] { return encode(probe, inputs).representation.dot(upstream); };
  GradCheckOptions options;
  options.tolerance = tolerance;
  return check_gradients(probe.params(), loss, grads, options);
}

}  // namespace mcnorm
