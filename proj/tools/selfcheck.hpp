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

#include <functional>
#include <string>
#include <vector>

#include "qrdr/qrdr.hpp"

namespace qrdr::tools {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline RMatrix random_data(Index m, Index n, CounterRng& rng) {
  RMatrix x(m, n);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

inline CheckResult check(std::string name, const std::function<std::string()>& body) {
  try {
    std::string failure = body();
    return {std::move(name), failure.empty(), std::move(failure)};
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("threw: ") + e.what()};
  }
}

inline std::string expect(bool ok, const std::string& what) { return ok ? "" : what; }

}  // namespace detail

/// The invariant suite behind `qrdr verify`. Small instances only.
inline std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
  using detail::check;
  using detail::expect;
  std::vector<CheckResult> out;
  CounterRng rng(seed, 0x766572696679ULL);

  out.push_back(check("kron_entrywise", [&] {
    const RMatrix a = detail::random_data(2, 3, rng), b = detail::random_data(3, 2, rng);
    const CMatrix k = kron(CMatrix(a.cast<Complex>()), CMatrix(b.cast<Complex>()));
    double err = 0;
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 3; ++j)
        for (Index p = 0; p < 3; ++p)
          for (Index q = 0; q < 2; ++q) err = std::max(err, std::abs(k(i * 3 + p, j * 2 + q) - a(i, j) * b(p, q)));
    return expect(err == 0.0, "entry mismatch " + std::to_string(err));
  }));

  out.push_back(check("hermitian_eig_reconstruction", [&] {
    CMatrix m(6, 6);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(rng.normal(), rng.normal());
    const HermitianMatrix h = HermitianMatrix::symmetrized(m + m.adjoint());
    const auto d = hermitian_eig(h);
    const double rec = max_abs(CMatrix(d.reconstruct() - h.matrix()));
    const double orth = max_abs(CMatrix(d.eigenvectors.adjoint() * d.eigenvectors - CMatrix::Identity(6, 6)));
    return expect(rec <= tol::kReconstruction && orth <= tol::kReconstruction, "reconstruction " + std::to_string(rec));
  }));

  out.push_back(check("blockwise_matches_dense", [&] {
    const QrdrProblem p = prepare_qrdr(detail::random_data(4, 4, rng), 2);
    const auto h = build_hamiltonian(p.pca, p.layout, delta_min(p) / 50.0);
    const double diff = (evolve_blockwise(h, p.input_state) - evolve_full(h, p.input_state)).cwiseAbs().maxCoeff();
    return expect(diff <= 1e-10, "max amplitude difference " + std::to_string(diff));
  }));

  out.push_back(check("qrdr_error_law", [&] {
    const QrdrProblem p = prepare_qrdr(detail::random_data(16, 8, rng), 4);
    const double dm = delta_min(p);
    const QrdrOutcome o = run_qrdr(p, dm / 100.0);
    return expect(o.epsilon <= 10.0 * 1e-4, "epsilon " + std::to_string(o.epsilon));
  }));

  out.push_back(check("success_probability_is_variance_fraction", [&] {
    const QrdrProblem p = prepare_qrdr(detail::random_data(16, 8, rng), 4);
    const QrdrOutcome o = run_qrdr(p, delta_min(p) / 100.0);
    const double gap = std::abs(o.success_probability - o.variance_fraction);
    return expect(gap <= o.epsilon + 0.01, "|P - variance fraction| = " + std::to_string(gap));
  }));

  out.push_back(check("lssvm_residual", [&] {
    const RMatrix x = detail::random_data(8, 3, rng);
    std::vector<int> y;
    for (Index i = 0; i < 8; ++i) y.push_back(x(i, 0) >= 0 ? 1 : -1);
    y[0] = 1;
    y[1] = -1;
    const auto m = train_lssvm(x, y, 2.0);
    return expect(std::abs(m.eta.sum()) <= 1e-8, "sum eta = " + std::to_string(m.eta.sum()));
  }));

  out.push_back(check("tfim_z2_symmetry", [&] {
    const TfimSpec spec{4, 1.0, 0.7};
    const RMatrix h = build_tfim(spec).matrix();
    RMatrix parity = RMatrix::Zero(16, 16);
    for (Index s = 0; s < 16; ++s) parity(s ^ 15, s) = 1.0;
    const double comm = (h * parity - parity * h).cwiseAbs().maxCoeff();
    return expect(comm <= 1e-12, "commutator " + std::to_string(comm));
  }));

  out.push_back(check("lcu_select_unitary", [&] {
    double worst = 0;
    for (int k = 0; k < qcnn::kAncillaDim; ++k) {
      const RMatrix q = qcnn::branch_matrix(k, 4);
      worst = std::max(worst, (q * q.transpose() - RMatrix::Identity(16, 16)).cwiseAbs().maxCoeff());
    }
    const RMatrix e = qcnn::shift_operator(2);
    RMatrix p = RMatrix::Identity(4, 4);
    for (int i = 0; i < 4; ++i) p = e * p;
    worst = std::max(worst, (p - RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff());
    return expect(worst == 0.0, "branch operators are not permutations");
  }));

  out.push_back(check("pooled_state_is_density", [&] {
    CVector psi(16);
    for (Index i = 0; i < 16; ++i) psi(i) = Complex(rng.normal(), rng.normal());
    psi.normalize();
    const CMatrix rho = qcnn::pool_discard(psi);
    const auto eig = hermitian_eig(HermitianMatrix::symmetrized(rho));
    const double tr = std::abs(rho.trace() - 1.0);
    return expect(tr <= 1e-12 && eig.eigenvalues.minCoeff() >= -1e-12, "trace or positivity violated");
  }));

  out.push_back(check("ansatz_identity_at_zero", [&] {
    const CVector a = qcnn::prepare_ansatz(RVector::Zero(qcnn::kAnsatzParameters));
    return expect(std::abs(a(0) - 1.0) <= 1e-15, "theta = 0 does not give |0000>");
  }));

  out.push_back(check("parameter_shift_matches_finite_difference", [&] {
    qcnn::QcnnModel m = qcnn::init_qcnn(4, 1, seed);
    qcnn::StateBatch batch;
    for (int i = 0; i < 4; ++i) {
      CVector z(16);
      for (Index k = 0; k < 16; ++k) z(k) = Complex(rng.normal(), 0.0);
      batch.states.push_back(z.normalized());
      batch.labels.push_back(i % 2 ? 1 : -1);
    }
    qcnn::TrainConfig fd, ps;
    ps.gradient = qcnn::GradientMethod::kParameterShift;
    const RVector g1 = qcnn::loss_and_grad(m, batch, fd).grad;
    const RVector g2 = qcnn::loss_and_grad(m, batch, ps).grad;
    const double rel = (g1 - g2).norm() / std::max(1e-12, g2.norm());
    return expect(rel <= 1e-4, "relative difference " + std::to_string(rel));
  }));

  return out;
}

}  // namespace qrdr::tools
