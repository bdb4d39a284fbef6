// Copyright 2026 The QRDR Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qrdr/adam.hpp"
#include "qrdr/errors.hpp"
#include "qrdr/qcnn.hpp"
#include "qrdr/rng.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr::mlp {

inline constexpr int kHiddenLayers = 3;
inline constexpr int kHiddenWidth = 128;

/// Three ReLU layers of 128 units and one output logit.
struct MlpModel {
  std::vector<RMatrix> weights;  // out x in
  std::vector<RVector> biases;

  Index inputs() const { return weights.front().cols(); }

  Index parameter_count() const {
    Index n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }

  RVector flat() const {
    RVector p(parameter_count());
    Index o = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      p.segment(o, weights[l].size()) = weights[l].reshaped();
      o += weights[l].size();
      p.segment(o, biases[l].size()) = biases[l];
      o += biases[l].size();
    }
    return p;
  }

  void set_flat(const RVector& p) {
    if (p.size() != parameter_count()) throw DimensionError("mlp: flat parameter count");
    Index o = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weights[l].reshaped() = p.segment(o, weights[l].size());
      o += weights[l].size();
      biases[l] = p.segment(o, biases[l].size());
      o += biases[l].size();
    }
  }
};

/// He-normal weights, zero biases.
inline MlpModel init_mlp(Index inputs, std::uint64_t seed) {
  if (inputs < 1) throw ValidationError("mlp: need at least one input feature");
  CounterRng rng(seed, /*stream=*/0x6d6c70ULL);
  MlpModel m;
  Index fan_in = inputs;
  for (int l = 0; l <= kHiddenLayers; ++l) {
    const Index out = l < kHiddenLayers ? kHiddenWidth : 1;
    RMatrix w(out, fan_in);
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = scale * rng.normal();
    m.weights.push_back(std::move(w));
    m.biases.push_back(RVector::Zero(out));
    fan_in = out;
  }
  return m;
}

inline double logit(const MlpModel& m, const RVector& x) {
  if (x.size() != m.inputs()) throw DimensionError("mlp: input has wrong feature count");
  RVector a = x;
  for (std::size_t l = 0; l + 1 < m.weights.size(); ++l) a = (m.weights[l] * a + m.biases[l]).cwiseMax(0.0);
  return (m.weights.back() * a + m.biases.back())(0);
}

struct LossGrad {
  double loss = 0.0;
  RVector grad;
};

/// Mean BCE over rows of x and its backpropagated gradient.
inline LossGrad loss_and_grad(const MlpModel& m, const RMatrix& x, const std::vector<int>& labels) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DimensionError("mlp loss: batch and label count disagree");
  }
  const std::size_t layers = m.weights.size();
  std::vector<RMatrix> gw(layers);
  std::vector<RVector> gb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    gw[l] = RMatrix::Zero(m.weights[l].rows(), m.weights[l].cols());
    gb[l] = RVector::Zero(m.biases[l].size());
  }
  LossGrad out;
  for (Index i = 0; i < x.rows(); ++i) {
    std::vector<RVector> acts{x.row(i).transpose()};
    for (std::size_t l = 0; l + 1 < layers; ++l) {
      acts.push_back((m.weights[l] * acts.back() + m.biases[l]).cwiseMax(0.0));
    }
    const double e = (m.weights.back() * acts.back() + m.biases.back())(0);
    const double t = qcnn::target01(labels[static_cast<std::size_t>(i)]);
    const double li = qcnn::bce_logit(e, t);
    if (!std::isfinite(li)) throw Error("mlp loss: non-finite loss at batch sample " + std::to_string(i));
    out.loss += li;
    RVector delta = RVector::Constant(1, qcnn::sigmoid(e) - t);
    for (std::size_t l = layers; l-- > 0;) {
      gw[l] += delta * acts[l].transpose();
      gb[l] += delta;
      if (l == 0) break;
      RVector back = m.weights[l].transpose() * delta;
      for (Index k = 0; k < back.size(); ++k) {
        if (acts[l](k) <= 0.0) back(k) = 0.0;
      }
      delta = std::move(back);
    }
  }
  const double n = static_cast<double>(x.rows());
  out.loss /= n;
  out.grad.resize(m.parameter_count());
  Index o = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    out.grad.segment(o, gw[l].size()) = gw[l].reshaped() / n;
    o += gw[l].size();
    out.grad.segment(o, gb[l].size()) = gb[l] / n;
    o += gb[l].size();
  }
  return out;
}

inline qcnn::Evaluation evaluate(const MlpModel& m, const RMatrix& x, const std::vector<int>& labels) {
  qcnn::Evaluation ev;
  std::size_t hit = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    const double e = logit(m, x.row(i).transpose());
    const int y = labels[static_cast<std::size_t>(i)];
    ev.loss += qcnn::bce_logit(e, qcnn::target01(y));
    hit += (e >= 0.0 ? 1 : -1) == y;
  }
  ev.loss /= static_cast<double>(x.rows());
  ev.accuracy = static_cast<double>(hit) / static_cast<double>(x.rows());
  return ev;
}

inline RMatrix take_rows(const RMatrix& x, const std::vector<std::size_t>& rows) {
  RMatrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = x.row(static_cast<Index>(rows[r]));
  return out;
}

/// Same batching, epochs and optimizer as the quantum arms.
inline qcnn::History train(MlpModel& m, const RMatrix& x_train, const std::vector<int>& y_train,
                           const RMatrix& x_test, const std::vector<int>& y_test, const qcnn::TrainConfig& cfg,
                           std::string arm = "mlp") {
  cfg.validate(y_train.size());
  Adam adam(m.parameter_count(), cfg.adam);
  qcnn::History h;
  h.arm = std::move(arm);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = qcnn::epoch_order(y_train.size(), cfg.seed, epoch);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(stop));
      std::vector<int> yb;
      for (auto i : idx) yb.push_back(y_train[i]);
      const LossGrad lg = loss_and_grad(m, take_rows(x_train, idx), yb);
      RVector p = m.flat();
      adam.step(p, lg.grad);
      m.set_flat(p);
    }
    const auto tr = evaluate(m, x_train, y_train);
    const auto te = evaluate(m, x_test, y_test);
    h.epochs.push_back({epoch, tr.loss, tr.accuracy, te.loss, te.accuracy, 1.0});
  }
  return h;
}

}  // namespace qrdr::mlp
