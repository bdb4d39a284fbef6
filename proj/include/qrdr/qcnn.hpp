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

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "qrdr/adam.hpp"
#include "qrdr/dataset.hpp"
#include "qrdr/errors.hpp"
#include "qrdr/parallel.hpp"
#include "qrdr/rng.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

namespace qcnn {

inline constexpr int kAncillaQubits = 4;
inline constexpr Index kAncillaDim = 16;
inline constexpr int kAnsatzLayers = 3;
inline constexpr int kAnsatzParameters = kAncillaQubits * (2 * kAnsatzLayers + 1);  // 28
inline constexpr int kBranches = 9;

/// Cyclic increment |j> -> |j+1 mod 2^q>.
inline RMatrix shift_operator(int half_qubits) {
  if (half_qubits < 1) throw ValidationError("shift_operator: need at least one qubit");
  const Index dim = Index{1} << half_qubits;
  RMatrix e = RMatrix::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j) e((j + 1) % dim, j) = 1.0;
  return e;
}

// ---------------------------------------------------------------- ansatz

namespace detail {

inline void apply_single(CVector& psi, int qubit, const std::array<Complex, 4>& g) {
  const Index bit = Index{1} << (kAncillaQubits - 1 - qubit);
  for (Index s = 0; s < psi.size(); ++s) {
    if (s & bit) continue;
    const Complex a = psi(s);
    const Complex b = psi(s | bit);
    psi(s) = g[0] * a + g[1] * b;
    psi(s | bit) = g[2] * a + g[3] * b;
  }
}

inline std::array<Complex, 4> ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {c, -s, s, c};
}

inline std::array<Complex, 4> rz(double t) {
  return {std::exp(-kI * (t / 2)), 0.0, 0.0, std::exp(kI * (t / 2))};
}

/// Generator factor -i G / 2 for the derivative of exp(-i t G / 2).
inline std::array<Complex, 4> ry_generator() { return {0.0, -0.5, 0.5, 0.0}; }
inline std::array<Complex, 4> rz_generator() { return {-0.5 * kI, 0.0, 0.0, 0.5 * kI}; }

inline void apply_cnot(CVector& psi, int control, int target) {
  const Index cb = Index{1} << (kAncillaQubits - 1 - control);
  const Index tb = Index{1} << (kAncillaQubits - 1 - target);
  for (Index s = 0; s < psi.size(); ++s) {
    if ((s & cb) && !(s & tb)) std::swap(psi(s), psi(s | tb));
  }
}

/// Runs the circuit; if `differentiate` >= 0 the generator of that parameter
/// is inserted right after its gate.
inline CVector run_ansatz(const double* theta, int differentiate) {
  CVector psi = CVector::Zero(kAncillaDim);
  psi(0) = 1.0;
  int p = 0;
  auto rotate = [&](int q, bool is_y) {
    apply_single(psi, q, is_y ? ry(theta[p]) : rz(theta[p]));
    if (p == differentiate) apply_single(psi, q, is_y ? ry_generator() : rz_generator());
    ++p;
  };
  for (int layer = 0; layer < kAnsatzLayers; ++layer) {
    for (int q = 0; q < kAncillaQubits; ++q) {
      rotate(q, true);
      rotate(q, false);
    }
    for (int q = 0; q < kAncillaQubits; ++q) apply_cnot(psi, q, (q + 1) % kAncillaQubits);
  }
  for (int q = 0; q < kAncillaQubits; ++q) rotate(q, true);
  return psi;
}

inline void require_ansatz_size(Index n) {
  if (n != kAnsatzParameters) {
    throw ValidationError("ansatz expects " + std::to_string(kAnsatzParameters) + " parameters, got " +
                          std::to_string(n));
  }
}

}  // namespace detail

/// S|0000> for the 28-parameter hardware-efficient ansatz.
inline CVector prepare_ansatz(const RVector& theta) {
  detail::require_ansatz_size(theta.size());
  return detail::run_ansatz(theta.data(), -1);
}

/// Column m is d(S|0000>)/d theta_m.
inline CMatrix ansatz_jacobian(const RVector& theta) {
  detail::require_ansatz_size(theta.size());
  CMatrix jac(kAncillaDim, kAnsatzParameters);
  for (int m = 0; m < kAnsatzParameters; ++m) jac.col(m) = detail::run_ansatz(theta.data(), m);
  return jac;
}

/// LCU weights |a_k|^2 with a = S|0000>.
inline RVector branch_weights(const CVector& ancilla) {
  if (ancilla.size() != kAncillaDim) throw DimensionError("branch_weights: ancilla must be 16-dim");
  return ancilla.cwiseAbs2();
}

// ----------------------------------------------------------- convolution

namespace detail {

/// Index of E_{a+1}|j> on a half register of size dim: a = 0 increment,
/// a = 1 identity, a = 2 decrement.
inline Index shift_index(int a, Index j, Index dim) {
  if (a == 0) return (j + 1) % dim;
  if (a == 2) return (j + dim - 1) % dim;
  return j;
}

inline int qubits_of(Index dim, const char* what) {
  if (dim < 4 || (dim & (dim - 1)) != 0) throw DimensionError(std::string(what) + ": dimension must be 2^r");
  const int r = std::countr_zero(static_cast<unsigned long long>(dim));
  if (r % 2 != 0) throw DimensionError(std::string(what) + ": qubit count must be even");
  return r;
}

/// Image of basis index s under Q_k on an r-qubit register.
inline Index branch_image(int k, Index s, int r) {
  if (k >= kBranches) return s;
  const int half = r / 2;
  const Index hd = Index{1} << half;
  const Index hi = s >> half;
  const Index lo = s & (hd - 1);
  return (shift_index(k / 3, hi, hd) << half) | shift_index(k % 3, lo, hd);
}

}  // namespace detail

/// Q_k applied to a state over r qubits.
inline CVector apply_branch(int k, const CVector& z) {
  const int r = detail::qubits_of(z.size(), "apply_branch");
  CVector out(z.size());
  for (Index s = 0; s < z.size(); ++s) out(detail::branch_image(k, s, r)) = z(s);
  return out;
}

/// Dense Q_k.
inline RMatrix branch_matrix(int k, int r) {
  const Index dim = Index{1} << r;
  detail::qubits_of(dim, "branch_matrix");
  RMatrix q = RMatrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) q(detail::branch_image(k, s, r), s) = 1.0;
  return q;
}

/// sum_k w_k Q_k.
inline RMatrix lcu_operator(const RVector& weights, int r) {
  if (weights.size() != kAncillaDim) throw DimensionError("lcu_operator: 16 weights expected");
  const Index dim = Index{1} << r;
  detail::qubits_of(dim, "lcu_operator");
  RMatrix k = RMatrix::Zero(dim, dim);
  for (int b = 0; b < kAncillaDim; ++b) {
    if (weights(b) == 0.0) continue;
    for (Index s = 0; s < dim; ++s) k(detail::branch_image(b, s, r), s) += weights(b);
  }
  return k;
}

struct LcuResult {
  double probability = 0.0;
  CVector state;  // renormalized
};

namespace tol {
inline constexpr double kLcuPostselection = 1e-12;
}  // namespace tol

/// Ancilla-<0000| block of S^dag SELECT S on |0000>|z>, renormalized.
/// `ancilla` is S|0000>.
inline LcuResult conv_lcu(const CVector& z, const CVector& ancilla) {
  const RVector w = branch_weights(ancilla);
  const int r = detail::qubits_of(z.size(), "conv_lcu");
  CVector y = CVector::Zero(z.size());
  for (int b = 0; b < kAncillaDim; ++b) {
    if (w(b) == 0.0) continue;
    for (Index s = 0; s < z.size(); ++s) y(detail::branch_image(b, s, r)) += w(b) * z(s);
  }
  LcuResult out;
  out.probability = y.squaredNorm();
  if (!(out.probability >= tol::kLcuPostselection)) {
    throw PostselectionError("conv_lcu: post-selection probability " + std::to_string(out.probability) +
                             " below threshold");
  }
  out.state = y / std::sqrt(out.probability);
  return out;
}

/// Partial trace over the second half of the qubits of a pure state.
inline CMatrix pool_discard(const CVector& psi) {
  const int r = detail::qubits_of(psi.size(), "pool_discard");
  const Index keep = Index{1} << (r / 2);
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      psi.data(), keep, psi.size() / keep);
  return m * m.adjoint();
}

/// Partial trace over the second half of the qubits of a density operator.
inline CMatrix pool_discard(const CMatrix& rho) {
  const int r = detail::qubits_of(rho.rows(), "pool_discard");
  const Index keep = Index{1} << (r / 2);
  const Index drop = rho.rows() / keep;
  CMatrix out = CMatrix::Zero(keep, keep);
  for (Index a = 0; a < keep; ++a) {
    for (Index b = 0; b < keep; ++b) {
      Complex s = 0.0;
      for (Index l = 0; l < drop; ++l) s += rho(a * drop + l, b * drop + l);
      out(a, b) = s;
    }
  }
  return out;
}

// --------------------------------------------------------------- readout

/// h0 I + sum_i h_i Z_i + sum_{i<j} h_ij Z_i Z_j over q qubits.
struct ReadoutCoefficients {
  double h0 = 0.0;
  RVector hi;
  RVector hij;  // pairs (i, j), i < j, lexicographic

  static ReadoutCoefficients zeros(int qubits) {
    return {0.0, RVector::Zero(qubits), RVector::Zero(qubits * (qubits - 1) / 2)};
  }
  int qubits() const { return static_cast<int>(hi.size()); }
  Index size() const { return 1 + hi.size() + hij.size(); }
};

/// Diagonal of the readout operator, one entry per basis state.
inline RVector readout_diagonal(const ReadoutCoefficients& h) {
  const int q = h.qubits();
  if (h.hij.size() != q * (q - 1) / 2) throw DimensionError("readout: pair coefficient count");
  const Index dim = Index{1} << q;
  RVector d(dim);
  for (Index s = 0; s < dim; ++s) {
    auto z = [&](int i) { return ((s >> (q - 1 - i)) & 1) ? -1.0 : 1.0; };
    double e = h.h0;
    Index p = 0;
    for (int i = 0; i < q; ++i) e += h.hi(i) * z(i);
    for (int i = 0; i < q; ++i) {
      for (int j = i + 1; j < q; ++j) e += h.hij(p++) * z(i) * z(j);
    }
    d(s) = e;
  }
  return d;
}

/// Tr(rho H) for the diagonal readout H.
inline double readout_expectation(const CMatrix& rho, const ReadoutCoefficients& h) {
  const RVector d = readout_diagonal(h);
  if (rho.rows() != d.size() || rho.cols() != d.size()) {
    throw DimensionError("readout_expectation: density operator does not match coefficient qubit count");
  }
  return (rho.diagonal().real().array() * d.array()).sum();
}

/// d e / d(h0, h_i, h_ij): the features 1, <Z_i>, <Z_i Z_j> of the diagonal
/// population vector.
inline RVector readout_features(const RVector& populations, int q) {
  RVector f(1 + q + q * (q - 1) / 2);
  f.setZero();
  for (Index s = 0; s < populations.size(); ++s) {
    auto z = [&](int i) { return ((s >> (q - 1 - i)) & 1) ? -1.0 : 1.0; };
    const double w = populations(s);
    f(0) += w;
    Index p = 1 + q;
    for (int i = 0; i < q; ++i) f(1 + i) += w * z(i);
    for (int i = 0; i < q; ++i) {
      for (int j = i + 1; j < q; ++j) f(p++) += w * z(i) * z(j);
    }
  }
  return f;
}

// ----------------------------------------------------------------- model

struct QcnnModel {
  int data_qubits = 4;  // r
  int layers = 1;       // conv + pool stages
  RVector theta;        // 28 per layer
  ReadoutCoefficients readout;

  int output_qubits() const { return data_qubits >> layers; }
  Index parameter_count() const { return theta.size() + readout.size(); }

  void validate() const {
    int q = data_qubits;
    for (int l = 0; l < layers; ++l) {
      if (q < 2 || q % 2 != 0) {
        throw ValidationError("qcnn: " + std::to_string(data_qubits) + " qubits cannot support " +
                              std::to_string(layers) + " conv+pool layers");
      }
      q /= 2;
    }
    if (layers < 1) throw ValidationError("qcnn: need at least one layer");
    if (theta.size() != kAnsatzParameters * layers) throw DimensionError("qcnn: theta size");
    if (readout.qubits() != q) throw DimensionError("qcnn: readout qubit count");
  }

  RVector flat() const {
    RVector p(parameter_count());
    p.head(theta.size()) = theta;
    Index o = theta.size();
    p(o++) = readout.h0;
    p.segment(o, readout.hi.size()) = readout.hi;
    o += readout.hi.size();
    p.segment(o, readout.hij.size()) = readout.hij;
    return p;
  }

  void set_flat(const RVector& p) {
    if (p.size() != parameter_count()) throw DimensionError("qcnn: flat parameter count");
    theta = p.head(theta.size());
    Index o = theta.size();
    readout.h0 = p(o++);
    readout.hi = p.segment(o, readout.hi.size());
    o += readout.hi.size();
    readout.hij = p.segment(o, readout.hij.size());
  }

  RVector layer_theta(int l) const { return theta.segment(kAnsatzParameters * l, kAnsatzParameters); }
};

inline QcnnModel init_qcnn(int data_qubits, int layers, std::uint64_t seed) {
  QcnnModel m;
  m.data_qubits = data_qubits;
  m.layers = layers;
  m.theta.resize(kAnsatzParameters * layers);
  CounterRng rng(seed, /*stream=*/0x71636e6eULL);
  for (Index i = 0; i < m.theta.size(); ++i) m.theta(i) = rng.uniform(-M_PI, M_PI);
  m.readout = ReadoutCoefficients::zeros(std::max(1, data_qubits >> layers));
  for (Index i = 0; i < m.readout.hi.size(); ++i) m.readout.hi(i) = 0.1 * rng.normal();
  for (Index i = 0; i < m.readout.hij.size(); ++i) m.readout.hij(i) = 0.1 * rng.normal();
  m.validate();
  return m;
}

inline void to_json(nlohmann::json& j, const QcnnModel& m) {
  const RVector p = m.flat();
  j = nlohmann::json{{"data_qubits", m.data_qubits},
                     {"layers", m.layers},
                     {"parameters", std::vector<double>(p.data(), p.data() + p.size())}};
}

struct Forward {
  double e = 0.0;
  RVector populations;  // diagonal of the final pooled state
  double min_probability = 1.0;
  CVector conv_unnormalized;  // single-layer path only: sum_k w_k Q_k z
};

/// Full forward pass with precomputed per-layer LCU weights.
inline Forward forward(const QcnnModel& m, const std::vector<RVector>& weights, const CVector& z) {
  if (z.size() != (Index{1} << m.data_qubits)) {
    throw DimensionError("qcnn forward: state has dim " + std::to_string(z.size()) + ", model expects 2^" +
                         std::to_string(m.data_qubits));
  }
  Forward f;
  int q = m.data_qubits;
  CMatrix rho;
  {
    const int r = q;
    CVector y = CVector::Zero(z.size());
    const RVector& w = weights[0];
    for (int b = 0; b < kAncillaDim; ++b) {
      if (w(b) == 0.0) continue;
      for (Index s = 0; s < z.size(); ++s) y(detail::branch_image(b, s, r)) += w(b) * z(s);
    }
    const double p = y.squaredNorm();
    if (!(p >= tol::kLcuPostselection)) throw PostselectionError("qcnn forward: post-selection failed");
    f.min_probability = p;
    f.conv_unnormalized = y;
    rho = pool_discard(CVector(y / std::sqrt(p)));
    q /= 2;
  }
  for (int l = 1; l < m.layers; ++l) {
    const RMatrix k = lcu_operator(weights[static_cast<std::size_t>(l)], q);
    CMatrix next = k * rho * k.transpose();
    const double p = next.trace().real();
    if (!(p >= tol::kLcuPostselection)) throw PostselectionError("qcnn forward: post-selection failed");
    f.min_probability = std::min(f.min_probability, p);
    rho = pool_discard(CMatrix(next / p));
    q /= 2;
  }
  f.populations = rho.diagonal().real();
  f.e = f.populations.dot(readout_diagonal(m.readout));
  return f;
}

inline std::vector<RVector> layer_weights(const QcnnModel& m) {
  std::vector<RVector> w;
  for (int l = 0; l < m.layers; ++l) w.push_back(branch_weights(prepare_ansatz(m.layer_theta(l))));
  return w;
}

inline double expectation(const QcnnModel& m, const CVector& z) { return forward(m, layer_weights(m), z).e; }

// ------------------------------------------------------------------ loss

inline double sigmoid(double e) { return e >= 0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e)); }

/// Binary cross-entropy with logit e and target t in {0, 1}.
inline double bce_logit(double e, double t) {
  const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
  return softplus - t * e;
}

inline double target01(int label) { return label > 0 ? 1.0 : 0.0; }

enum class GradientMethod { kFiniteDifference, kParameterShift };

struct TrainConfig {
  AdamConfig adam;
  int batch_size = 20;
  int epochs = 20;
  std::uint64_t seed = 7;
  GradientMethod gradient = GradientMethod::kFiniteDifference;
  double fd_step = 1e-5;
  unsigned threads = 1;

  void validate(std::size_t train_size) const {
    if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > train_size) {
      throw ValidationError("train: batch size must lie in [1, " + std::to_string(train_size) + "]");
    }
    if (!(fd_step > 0.0)) throw ValidationError("train: finite-difference step must be > 0");
  }
};

struct StateBatch {
  std::vector<CVector> states;
  std::vector<int> labels;
  std::size_t size() const { return states.size(); }
};

struct LossGrad {
  double loss = 0.0;
  RVector grad;
  double min_probability = 1.0;
};

namespace detail {

inline double batch_loss(const QcnnModel& m, const StateBatch& batch, unsigned threads, double* min_prob = nullptr) {
  const auto w = layer_weights(m);
  std::vector<double> per(batch.size());
  std::vector<double> prob(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    const Forward f = forward(m, w, batch.states[i]);
    per[i] = bce_logit(f.e, target01(batch.labels[i]));
    prob[i] = f.min_probability;
    if (!std::isfinite(per[i])) throw Error("qcnn loss: non-finite loss at batch sample " + std::to_string(i));
  });
  double s = 0.0;
  for (double v : per) s += v;
  if (min_prob) *min_prob = *std::min_element(prob.begin(), prob.end());
  return s / static_cast<double>(batch.size());
}

}  // namespace detail

/// Mean BCE over the batch and its gradient in flat parameter order.
inline LossGrad loss_and_grad(const QcnnModel& model, const StateBatch& batch, const TrainConfig& cfg) {
  if (batch.size() == 0) throw ValidationError("loss_and_grad: empty batch");
  model.validate();
  LossGrad out;
  out.loss = detail::batch_loss(model, batch, cfg.threads, &out.min_probability);
  const RVector p0 = model.flat();
  out.grad = RVector::Zero(p0.size());

  if (cfg.gradient == GradientMethod::kFiniteDifference) {
    QcnnModel probe = model;
    for (Index i = 0; i < p0.size(); ++i) {
      RVector p = p0;
      p(i) = p0(i) + cfg.fd_step;
      probe.set_flat(p);
      const double up = detail::batch_loss(probe, batch, cfg.threads);
      p(i) = p0(i) - cfg.fd_step;
      probe.set_flat(p);
      const double down = detail::batch_loss(probe, batch, cfg.threads);
      out.grad(i) = (up - down) / (2.0 * cfg.fd_step);
    }
    return out;
  }

  if (model.layers != 1) {
    throw ValidationError("loss_and_grad: parameter-shift gradients are implemented for one conv layer");
  }
  // d w_k / d theta_m by the +-pi/2 shift rule: w_k is the expectation of a
  // projector in a circuit where theta_m enters through one Pauli rotation.
  const RVector theta = model.layer_theta(0);
  RMatrix dw(kAncillaDim, kAnsatzParameters);
  for (int m = 0; m < kAnsatzParameters; ++m) {
    RVector tp = theta, tm = theta;
    tp(m) += M_PI / 2;
    tm(m) -= M_PI / 2;
    dw.col(m) = 0.5 * (branch_weights(prepare_ansatz(tp)) - branch_weights(prepare_ansatz(tm)));
  }
  const auto w = layer_weights(model);
  const int r = model.data_qubits;
  const int q = model.output_qubits();
  const RVector diag = readout_diagonal(model.readout);
  const Index drop = (Index{1} << r) >> q;

  std::vector<RVector> per(batch.size());
  parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
    const CVector& z = batch.states[i];
    const Forward f = forward(model, w, z);
    const double dl_de = sigmoid(f.e) - target01(batch.labels[i]);
    const CVector& y = f.conv_unnormalized;
    const double norm2 = y.squaredNorm();
    // O = readout (x) I on the discarded half.
    CVector oy(y.size());
    for (Index s = 0; s < y.size(); ++s) oy(s) = diag(s / drop) * y(s);
    RVector de_dw(kAncillaDim);
    for (int b = 0; b < kAncillaDim; ++b) {
      const CVector qz = apply_branch(b, z);
      de_dw(b) = (2.0 * oy.dot(qz).real() - f.e * 2.0 * y.dot(qz).real()) / norm2;
    }
    RVector g(model.parameter_count());
    g.head(kAnsatzParameters) = dl_de * (dw.transpose() * de_dw);
    g.tail(model.readout.size()) = dl_de * readout_features(f.populations, q);
    per[i] = g;
  });
  for (const auto& g : per) out.grad += g;
  out.grad /= static_cast<double>(batch.size());
  return out;
}

// -------------------------------------------------------------- training

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  double min_probability = 1.0;
};

struct History {
  std::string arm;
  std::vector<EpochRecord> epochs;
};

inline void to_json(nlohmann::json& j, const EpochRecord& r) {
  j = nlohmann::json{{"epoch", r.epoch},
                     {"train_loss", r.train_loss},
                     {"train_accuracy", r.train_accuracy},
                     {"test_loss", r.test_loss},
                     {"test_accuracy", r.test_accuracy},
                     {"min_postselection_probability", r.min_probability}};
}

inline void to_json(nlohmann::json& j, const History& h) { j = nlohmann::json{{"arm", h.arm}, {"epochs", h.epochs}}; }

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  double min_probability = 1.0;
};

inline Evaluation evaluate(const QcnnModel& m, const StateBatch& data, unsigned threads = 1) {
  const auto w = layer_weights(m);
  std::vector<Forward> f(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) { f[i] = forward(m, w, data.states[i]); });
  Evaluation ev;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ev.loss += bce_logit(f[i].e, target01(data.labels[i]));
    hit += (f[i].e >= 0.0 ? 1 : -1) == data.labels[i];
    ev.min_probability = std::min(ev.min_probability, f[i].min_probability);
  }
  ev.loss /= static_cast<double>(data.size());
  ev.accuracy = static_cast<double>(hit) / static_cast<double>(data.size());
  return ev;
}

/// Mini-batch order for one epoch.
inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
  CounterRng rng(seed, 0x65706f6368ULL + static_cast<std::uint64_t>(epoch));
  return permutation(n, rng);
}

inline StateBatch take(const StateBatch& data, const std::vector<std::size_t>& idx) {
  StateBatch b;
  for (auto i : idx) {
    b.states.push_back(data.states[i]);
    b.labels.push_back(data.labels[i]);
  }
  return b;
}

inline History train(QcnnModel& model, const StateBatch& train_set, const StateBatch& test_set,
                     const TrainConfig& cfg, std::string arm = "qcnn") {
  cfg.validate(train_set.size());
  model.validate();
  Adam adam(model.parameter_count(), cfg.adam);
  History h;
  h.arm = std::move(arm);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = epoch_order(train_set.size(), cfg.seed, epoch);
    double min_prob = 1.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const StateBatch batch = take(train_set, {order.begin() + static_cast<std::ptrdiff_t>(start),
                                                order.begin() + static_cast<std::ptrdiff_t>(stop)});
      const LossGrad lg = loss_and_grad(model, batch, cfg);
      min_prob = std::min(min_prob, lg.min_probability);
      RVector p = model.flat();
      adam.step(p, lg.grad);
      model.set_flat(p);
    }
    const Evaluation tr = evaluate(model, train_set, cfg.threads);
    const Evaluation te = evaluate(model, test_set, cfg.threads);
    h.epochs.push_back({epoch, tr.loss, tr.accuracy, te.loss, te.accuracy,
                        std::min({min_prob, tr.min_probability, te.min_probability})});
  }
  return h;
}

inline void write_history_csv(const std::vector<History>& arms, std::ostream& out) {
  out << "arm,epoch,train_loss,train_acc,test_loss,test_acc\n";
  out.precision(17);
  for (const auto& h : arms) {
    for (const auto& r : h.epochs) {
      out << h.arm << ',' << r.epoch << ',' << r.train_loss << ',' << r.train_accuracy << ',' << r.test_loss
          << ',' << r.test_accuracy << '\n';
    }
  }
}

}  // namespace qcnn

}  // namespace qrdr
