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

// Resonant dimensionality reduction on a dense state vector.
//
// Register order, most significant first: probe (1 qubit), ancilla (r
// qubits), data (n qubits), sample (M levels, not padded). A global basis
// index is therefore ((p * 2^r + j) * 2^n + d) * M + i, and the probe-1 half
// of any state is its upper half.

#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qrdr/errors.hpp"
#include "qrdr/parallel.hpp"
#include "qrdr/pca.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

struct RegisterLayout {
  int ancilla_qubits = 0;  // r
  int data_qubits = 0;     // n
  Index samples = 1;       // M

  static RegisterLayout for_problem(Index retained, Index features, Index samples) {
    if (retained < 1 || features < 1 || samples < 1) {
      throw ValidationError("register layout: R, N and M must be positive");
    }
    return RegisterLayout{qubits_for(retained), qubits_for(features), samples};
  }

  Index ancilla_dim() const noexcept { return Index{1} << ancilla_qubits; }
  Index data_dim() const noexcept { return Index{1} << data_qubits; }
  /// Probe x ancilla levels, the size of one eigenvector sector.
  Index sector_dim() const noexcept { return 2 * ancilla_dim(); }
  /// 2^(1+r+n): one sample block.
  Index local_dim() const noexcept { return sector_dim() * data_dim(); }
  Index total_dim() const noexcept { return local_dim() * samples; }
  int sample_qubits() const { return qubits_for(samples); }

  Index index(int probe, Index ancilla, Index data, Index sample) const noexcept {
    return ((probe * ancilla_dim() + ancilla) * data_dim() + data) * samples + sample;
  }
};

/// sum_{i,j} x_i^j |j>|i> / ||X||_F, basis index j * M + i.
inline CVector encode_dataset_state(const RMatrix& x) {
  const double norm = x.norm();
  if (!(norm > 0.0)) throw ValidationError("encode_dataset_state: data matrix is zero");
  const Index m = x.rows();
  CVector out(x.size());
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < m; ++i) out(j * m + i) = x(i, j) / norm;
  }
  return out;
}

/// The resonance Hamiltonian
///   |0><0| (x) (|0><0|^r - I) (x) I
/// + |1><1| (x) (H_lambda (x) I + I (x) A)
/// + (c pi / 2) sigma_y (x) B (x) I,      B = sqrt(2^r) H_d^{(x) r},
/// stored in factored form. Every term preserves span{|p>|j>|v>} for an
/// eigenvector v of A, which is what the blockwise evolution exploits.
class QrdrHamiltonian {
 public:
  RegisterLayout layout;
  int retained = 0;         // R
  double c = 0.0;
  double t = 0.0;           // 1 / c
  double pad_value = 0.0;   // h_k for R <= k < 2^r
  double delta_min = 0.0;
  RVector ancilla_diagonal; // h_k, size 2^r
  RVector sector_energies;  // eigenvalues of the padded A, size 2^n
  CMatrix sectors;          // 2^n x 2^n, column s spans sector s
  RMatrix data_operator;    // A embedded in the 2^n data register
  std::vector<std::string> warnings;

  double coupling() const noexcept { return c * M_PI / 2.0; }

  /// B = sqrt(2^r) H_d^{(x) r}: entry (a, b) = (-1)^{popcount(a & b)}.
  CMatrix coupling_pattern() const {
    const Index dim = layout.ancilla_dim();
    CMatrix b(dim, dim);
    for (Index x = 0; x < dim; ++x) {
      for (Index y = 0; y < dim; ++y) b(x, y) = (__builtin_popcountll(x & y) % 2) ? -1.0 : 1.0;
    }
    return b;
  }

  /// Restriction to span{|p>|j>|v_s>}, ordered p * 2^r + j.
  HermitianMatrix block(Index sector) const {
    const Index na = layout.ancilla_dim();
    CMatrix h = CMatrix::Zero(2 * na, 2 * na);
    for (Index j = 1; j < na; ++j) h(j, j) = -1.0;
    for (Index j = 0; j < na; ++j) h(na + j, na + j) = ancilla_diagonal(j) + sector_energies(sector);
    const CMatrix b = coupling_pattern();
    h.topRightCorner(na, na) = -kI * coupling() * b;
    h.bottomLeftCorner(na, na) = kI * coupling() * b;
    return HermitianMatrix(std::move(h));
  }

  /// Full 2^(1+r+n) matrix. Memory grows as 4^(1+r+n); meant for reference
  /// checks on small registers.
  HermitianMatrix dense() const {
    const Index na = layout.ancilla_dim();
    const Index nd = layout.data_dim();
    const CMatrix id_data = CMatrix::Identity(nd, nd);
    CMatrix vacuum = -CMatrix::Identity(na, na);
    vacuum(0, 0) = 0.0;
    const CMatrix problem = kron(CMatrix(ancilla_diagonal.cast<Complex>().asDiagonal()), id_data) +
                            kron(CMatrix::Identity(na, na), data_operator.cast<Complex>());
    CMatrix p0 = CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    CMatrix p1 = CMatrix::Zero(2, 2);
    p1(1, 1) = 1.0;
    CMatrix h = kron(p0, kron(vacuum, id_data)) + kron(p1, problem) +
                coupling() * kron(pauli::y(), kron(coupling_pattern(), id_data));
    return HermitianMatrix(std::move(h));
  }
};

struct HamiltonianOptions {
  /// Energy of unused ancilla slots; defaults to +lambda_1 so no padded level
  /// is resonant.
  std::optional<double> pad_value;
};

namespace detail {

/// Minimum detuning that controls off-resonant leakage; see QrdrHamiltonian.
inline double resonance_gap(const PcaModel& pca, int retained, Index ancilla_dim, double pad,
                            Index data_dim) {
  double gap = std::numeric_limits<double>::infinity();
  const RVector& lambda = pca.eigenvalues;
  const Index n = lambda.size();
  const Index last = std::min<Index>(retained, n);
  for (Index j = 0; j < last; ++j) {
    if (pca.is_null_level(j)) break;
    for (Index k = j + 1; k < last; ++k) {
      if (pca.is_null_level(k)) break;
      gap = std::min(gap, std::abs(lambda(j) - lambda(k)));
    }
    if (last < n) gap = std::min(gap, lambda(j) - lambda(last));
  }
  if (ancilla_dim > retained) {
    for (Index k = 0; k < n; ++k) gap = std::min(gap, std::abs(pad + lambda(k)));
    if (data_dim > n) gap = std::min(gap, std::abs(pad));
  }
  // |0>|a != 0> levels sit at energy -1.
  if (ancilla_dim > 1) gap = std::min(gap, 1.0);
  return gap;
}

}  // namespace detail

inline QrdrHamiltonian build_hamiltonian(const PcaModel& pca, const RegisterLayout& layout,
                                         double c, const HamiltonianOptions& options = {}) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("build_hamiltonian: c must be > 0");
  const int r = pca.retained;
  if (layout.ancilla_dim() < r) {
    throw ValidationError("build_hamiltonian: 2^r = " + std::to_string(layout.ancilla_dim()) +
                          " cannot hold R = " + std::to_string(r));
  }
  if (layout.data_dim() < pca.features()) {
    throw ValidationError("build_hamiltonian: data register too small for N features");
  }
  if (pca.degenerate_at_boundary) {
    std::ostringstream msg;
    msg << "build_hamiltonian: tied eigenvalues at indices";
    for (int k : pca.tied_pairs) msg << ' ' << k << '/' << k + 1;
    msg << "; resonance needs distinct detunings for the top R levels";
    throw AdmissibilityError(msg.str());
  }

  QrdrHamiltonian h;
  h.layout = layout;
  h.retained = r;
  h.c = c;
  h.t = 1.0 / c;
  h.pad_value = options.pad_value.value_or(pca.eigenvalues(0));

  const Index na = layout.ancilla_dim();
  const Index nd = layout.data_dim();
  const Index n = pca.features();
  h.ancilla_diagonal = RVector::Constant(na, h.pad_value);
  for (Index k = 0; k < r; ++k) h.ancilla_diagonal(k) = -pca.eigenvalues(k);

  h.sector_energies = RVector::Zero(nd);
  h.sector_energies.head(n) = pca.eigenvalues;
  h.sectors = CMatrix::Identity(nd, nd);
  h.sectors.topLeftCorner(n, n) = pca.components.transpose().cast<Complex>();
  h.data_operator = RMatrix::Zero(nd, nd);
  h.data_operator.topLeftCorner(n, n) =
      pca.components.transpose() * pca.eigenvalues.asDiagonal() * pca.components;

  h.delta_min = detail::resonance_gap(pca, r, na, h.pad_value, nd);
  if (c >= h.delta_min) {
    throw AdmissibilityError("build_hamiltonian: c = " + std::to_string(c) +
                             " is not below the minimum gap " + std::to_string(h.delta_min));
  }
  if (c > h.delta_min / 10.0) {
    h.warnings.push_back("c = " + std::to_string(c) + " exceeds delta_min / 10 = " +
                         std::to_string(h.delta_min / 10.0) + "; off-resonant error may be large");
  }
  return h;
}

namespace detail {

inline Index sample_count(const QrdrHamiltonian& h, const CVector& psi, const char* what) {
  const Index local = h.layout.local_dim();
  if (psi.size() == 0 || psi.size() % local != 0) {
    throw DimensionError(std::string(what) + ": state size " + std::to_string(psi.size()) +
                         " is not a multiple of the register size " + std::to_string(local));
  }
  return psi.size() / local;
}

using RowMajorCMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace detail

/// e^{-iHt} psi from a decomposition of the full matrix. The state may carry
/// any number of trailing sample levels.
inline CVector evolve_full(const QrdrHamiltonian& h, const CVector& psi) {
  const Index m = detail::sample_count(h, psi, "evolve_full");
  const CMatrix u = spectral_propagator(hermitian_eig(h.dense()), h.t);
  const Index local = h.layout.local_dim();
  Eigen::Map<const detail::RowMajorCMatrix> in(psi.data(), local, m);
  CVector out(psi.size());
  Eigen::Map<detail::RowMajorCMatrix> result(out.data(), local, m);
  result = u * in;
  return out;
}

/// Same map as evolve_full, one 2^(r+1) block per eigenvector of A.
inline CVector evolve_blockwise(const QrdrHamiltonian& h, const CVector& psi,
                                unsigned threads = 1) {
  const Index m = detail::sample_count(h, psi, "evolve_blockwise");
  const Index rows = h.layout.sector_dim();
  const Index nd = h.layout.data_dim();

  std::vector<CMatrix> propagators(static_cast<std::size_t>(nd));
  parallel_for(static_cast<std::size_t>(nd), threads, [&](std::size_t s) {
    propagators[s] = spectral_propagator(hermitian_eig(h.block(static_cast<Index>(s))), h.t);
  });

  // coeffs[row] is (sector x sample): <v_s| applied to the data register.
  std::vector<CMatrix> coeffs(static_cast<std::size_t>(rows));
  const CMatrix basis_adj = h.sectors.adjoint();
  for (Index row = 0; row < rows; ++row) {
    Eigen::Map<const detail::RowMajorCMatrix> slab(psi.data() + row * nd * m, nd, m);
    coeffs[static_cast<std::size_t>(row)] = basis_adj * slab;
  }
  std::vector<CMatrix> evolved(static_cast<std::size_t>(rows), CMatrix::Zero(nd, m));
  for (Index s = 0; s < nd; ++s) {
    CMatrix local(rows, m);
    for (Index row = 0; row < rows; ++row) local.row(row) = coeffs[static_cast<std::size_t>(row)].row(s);
    const CMatrix moved = propagators[static_cast<std::size_t>(s)] * local;
    for (Index row = 0; row < rows; ++row) evolved[static_cast<std::size_t>(row)].row(s) = moved.row(row);
  }
  CVector out(psi.size());
  for (Index row = 0; row < rows; ++row) {
    Eigen::Map<detail::RowMajorCMatrix> slab(out.data() + row * nd * m, nd, m);
    slab = h.sectors * evolved[static_cast<std::size_t>(row)];
  }
  return out;
}

struct Postselection {
  double probability = 0.0;
  CVector collapsed;  // same dimension as the input, probe-0 half zeroed
};

/// Conditions on probe = 1 (the upper half of the state) and renormalizes.
inline Postselection postselect_probe(const CVector& psi) {
  require_unit_norm(psi, "postselect_probe");
  if (psi.size() % 2 != 0) throw DimensionError("postselect_probe: odd state dimension");
  const Index half = psi.size() / 2;
  Postselection out;
  out.probability = psi.tail(half).squaredNorm();
  if (out.probability < tol::kPostselection) {
    throw PostselectionError("post-selection failed: probe-1 probability " +
                             std::to_string(out.probability));
  }
  out.collapsed = CVector::Zero(psi.size());
  out.collapsed.tail(half) = psi.tail(half) / std::sqrt(out.probability);
  return out;
}

/// Applies sum_{j<R} |j><j| (x) W_j + sum_{j>=R} |j><j| (x) I on the
/// ancilla and data registers, where the reflection W_j = I - 2 u u^T / |u|^2
/// with u = v_j - |0^n> swaps v_j and |0^n> exactly.
inline CVector disentangle(const CVector& psi, const PcaModel& pca, const RegisterLayout& layout) {
  if (psi.size() != layout.total_dim()) {
    throw DimensionError("disentangle: state size does not match the register layout");
  }
  const Index nd = layout.data_dim();
  const Index m = layout.samples;
  if (nd < pca.features() || layout.ancilla_dim() < pca.retained) {
    throw DimensionError("disentangle: PCA model does not fit the register layout");
  }
  CVector out = psi;
  for (Index j = 0; j < pca.retained; ++j) {
    CVector u = CVector::Zero(nd);
    u.head(pca.features()) = pca.components.row(j).transpose().cast<Complex>();
    u(0) -= 1.0;
    const double u_norm2 = u.squaredNorm();
    if (u_norm2 < 1e-28) continue;  // v_j is already |0^n>
    for (int p = 0; p < 2; ++p) {
      const Index offset = layout.index(p, j, 0, 0);
      Eigen::Map<detail::RowMajorCMatrix> slab(out.data() + offset, nd, m);
      const Eigen::RowVectorXcd overlap = u.adjoint() * slab;
      slab.noalias() -= (2.0 / u_norm2) * u * overlap;
    }
  }
  return out;
}

/// 1 - |<target|out>|^2.
inline double fidelity_error(const CVector& out, const CVector& target) {
  if (out.size() != target.size()) throw DimensionError("fidelity_error: dimension mismatch");
  require_unit_norm(out, "fidelity_error(out)");
  require_unit_norm(target, "fidelity_error(target)");
  const double overlap = std::norm(target.dot(out));
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

/// Everything about a QRDR instance that does not depend on c.
struct QrdrProblem {
  RMatrix x;
  PcaModel pca;
  RegisterLayout layout;
  CVector input_state;   // |0>|0^r>|X>
  CVector target_state;  // |1>|Z>|0^n>

  Index retained() const noexcept { return pca.retained; }
};

inline QrdrProblem prepare_qrdr(const RMatrix& x, int retained) {
  QrdrProblem p;
  p.x = x;
  p.pca = fit_pca(x, retained);
  p.layout = RegisterLayout::for_problem(retained, x.cols(), x.rows());
  const Index m = x.rows();

  const CVector encoded = encode_dataset_state(x);
  p.input_state = CVector::Zero(p.layout.total_dim());
  // |0>|0^r>|j>|i> has global index j * M + i, the encoding's own layout.
  p.input_state.head(encoded.size()) = encoded;

  const CVector z = target_state(project(x, p.pca));
  p.target_state = CVector::Zero(p.layout.total_dim());
  for (Index j = 0; j < retained; ++j) {
    for (Index i = 0; i < m; ++i) p.target_state(p.layout.index(1, j, 0, i)) = z(j * m + i);
  }
  return p;
}

enum class EvolutionPath { kBlockwise, kDense };

struct QrdrOptions {
  EvolutionPath path = EvolutionPath::kBlockwise;
  HamiltonianOptions hamiltonian;
  unsigned threads = 1;
};

struct QrdrOutcome {
  int retained = 0;        // R
  int ancilla_qubits = 0;  // r
  double c = 0.0;
  double t = 0.0;
  double success_probability = 0.0;
  /// Probe-1, data-|0^n> component over (ancilla x sample), basis index
  /// j * M + i, renormalized.
  CVector reduced_state;
  /// Weight of the disentangled state on data register |0^n>.
  double data_register_weight = 0.0;
  double epsilon = 0.0;
  double delta_min = 0.0;
  double variance_fraction = 0.0;
  std::vector<std::string> warnings;
};

inline void to_json(nlohmann::json& j, const QrdrOutcome& o) {
  j = nlohmann::json{{"R", o.retained},
                     {"ancilla_qubits", o.ancilla_qubits},
                     {"c", o.c},
                     {"t", o.t},
                     {"success_probability", o.success_probability},
                     {"epsilon", o.epsilon},
                     {"delta_min", o.delta_min},
                     {"variance_fraction", o.variance_fraction}};
}

inline QrdrOutcome run_qrdr(const QrdrProblem& problem, double c, const QrdrOptions& options = {}) {
  const QrdrHamiltonian h = build_hamiltonian(problem.pca, problem.layout, c, options.hamiltonian);
  const CVector evolved = options.path == EvolutionPath::kDense
                              ? evolve_full(h, problem.input_state)
                              : evolve_blockwise(h, problem.input_state, options.threads);
  const Postselection post = postselect_probe(evolved);
  const CVector out = disentangle(post.collapsed, problem.pca, problem.layout);

  QrdrOutcome o;
  o.retained = problem.retained();
  o.ancilla_qubits = problem.layout.ancilla_qubits;
  o.c = c;
  o.t = h.t;
  o.success_probability = post.probability;
  o.epsilon = fidelity_error(out, problem.target_state);
  o.delta_min = h.delta_min;
  o.variance_fraction = problem.pca.variance_fraction;
  o.warnings = h.warnings;

  const RegisterLayout& lay = problem.layout;
  const Index m = lay.samples;
  o.reduced_state = CVector::Zero(lay.ancilla_dim() * m);
  for (Index j = 0; j < lay.ancilla_dim(); ++j) {
    for (Index i = 0; i < m; ++i) o.reduced_state(j * m + i) = out(lay.index(1, j, 0, i));
  }
  o.data_register_weight = o.reduced_state.squaredNorm();
  if (o.data_register_weight < tol::kPostselection) {
    throw PostselectionError("run_qrdr: no weight left on the data register's |0^n>");
  }
  o.reduced_state /= std::sqrt(o.data_register_weight);
  return o;
}

inline QrdrOutcome run_qrdr(const RMatrix& x, int retained, double c,
                            const QrdrOptions& options = {}) {
  return run_qrdr(prepare_qrdr(x, retained), c, options);
}

/// Reads the reduced features z_i^j back out of the output state: removes the
/// global phase and rescales by ||Z||_F = sqrt(sum_{k<R} lambda_k), which the
/// algorithm takes as classical input. Rows are samples, columns j < R. The
/// overall sign is arbitrary.
inline RMatrix reduced_features(const QrdrOutcome& o, const PcaModel& pca, Index samples) {
  const Index m = samples;
  if (o.reduced_state.size() % m != 0) throw DimensionError("reduced_features: sample count");
  Complex square_sum = 0.0;
  for (Index k = 0; k < o.reduced_state.size(); ++k) square_sum += o.reduced_state(k) * o.reduced_state(k);
  const Complex unphase = std::abs(square_sum) > 0 ? std::exp(-kI * (std::arg(square_sum) / 2.0))
                                                   : Complex(1.0);
  const double scale = std::sqrt(pca.eigenvalues.head(pca.retained).sum());
  RMatrix z(m, pca.retained);
  for (Index j = 0; j < pca.retained; ++j) {
    for (Index i = 0; i < m; ++i) z(i, j) = (o.reduced_state(j * m + i) * unphase).real() * scale;
  }
  return z;
}

/// Per-sample normalized reduced states |z_i> over the 2^r ancilla levels.
inline std::vector<CVector> per_sample_states(const QrdrOutcome& o, Index samples) {
  const Index dim = o.reduced_state.size() / samples;
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (Index i = 0; i < samples; ++i) {
    CVector v(dim);
    for (Index j = 0; j < dim; ++j) v(j) = o.reduced_state(j * samples + i);
    const double n = v.norm();
    if (!(n > 0.0)) throw PostselectionError("per_sample_states: sample " + std::to_string(i) + " vanished");
    out.push_back(v / n);
  }
  return out;
}

}  // namespace qrdr
