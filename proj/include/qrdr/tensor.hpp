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

// Dense complex linear algebra shared by every other module: Kronecker
// products, Hermitian eigendecomposition, spectral propagators and SVD.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "qrdr/errors.hpp"

namespace qrdr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
/// Max-norm of M - M^H, relative to max(1, ||M||_max).
inline constexpr double kHermiticity = 1e-12;
/// Reconstruction and orthonormality of factorizations.
inline constexpr double kReconstruction = 1e-10;
/// Norm drift allowed for unit-norm states.
inline constexpr double kNorm = 1e-10;
/// Probability below which conditioning on an outcome is refused.
inline constexpr double kPostselection = 1e-12;
}  // namespace tol

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_finite(const CVector& v, const char* what) {
  if (!v.allFinite()) throw ValidationError(std::string(what) + ": non-finite amplitude");
}

inline void require_unit_norm(const CVector& v, const char* what, double tolerance = 1e-8) {
  require_finite(v, what);
  if (std::abs(v.norm() - 1.0) > tolerance) {
    throw ValidationError(std::string(what) + ": expected unit norm, got " +
                          std::to_string(v.norm()));
  }
}

/// Square matrix validated to satisfy M = M^H on construction.
template <typename Scalar>
class BasicHermitian {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit BasicHermitian(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      throw ValidationError("Hermitian matrix must be square and non-empty");
    }
    if (!m_.allFinite()) throw ValidationError("Hermitian matrix has non-finite entries");
    const double scale = std::max(1.0, max_abs(m_));
    const double skew = max_abs(Matrix(m_ - m_.adjoint()));
    if (skew > tol::kHermiticity * scale) {
      throw ValidationError("matrix is not Hermitian (max |M - M^H| = " + std::to_string(skew) +
                            ")");
    }
  }

  /// Averages with the adjoint first; for products like X^T X whose rounding
  /// is not exactly symmetric.
  static BasicHermitian symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("symmetrized: matrix must be square");
    return BasicHermitian(Matrix(0.5 * (m + m.adjoint())));
  }

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

using HermitianMatrix = BasicHermitian<Complex>;
using SymmetricMatrix = BasicHermitian<double>;

/// Eigenvalues sorted descending; column k of `eigenvectors` pairs with
/// eigenvalues[k].
template <typename Scalar>
struct SpectralDecomposition {
  RVector eigenvalues;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;

  Index size() const noexcept { return eigenvalues.size(); }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
  }
};

struct SvdResult {
  RVector singular_values;  // descending, >= 0
  RMatrix u;                // column k is u_k
  RMatrix v;                // column k is v_k

  RMatrix reconstruct() const { return u * singular_values.asDiagonal() * v.transpose(); }
};

/// Kronecker product: entry (i*rb + k, j*cb + l) = a(i,j) * b(k,l).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  if (a.size() == 0 || b.size() == 0) throw DimensionError("kron: empty operand");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          static_cast<Scalar>(a(i, j)) * b.template cast<Scalar>();
    }
  }
  return out;
}

/// Eigendecomposition of a Hermitian (or real symmetric) matrix, eigenvalues
/// descending. Ties keep the order the factorization produced them in.
template <typename Scalar>
SpectralDecomposition<Scalar> hermitian_eig(const BasicHermitian<Scalar>& h) {
  Eigen::SelfAdjointEigenSolver<typename BasicHermitian<Scalar>::Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw Error("hermitian_eig: eigensolver did not converge");
  const Index n = h.dim();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Eigen returns ascending values; reverse while keeping factorization order
  // within exact ties.
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    return solver.eigenvalues()(x) > solver.eigenvalues()(y);
  });
  SpectralDecomposition<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Unitary e^{-i H t} assembled from a decomposition of H.
template <typename Scalar>
CMatrix spectral_propagator(const SpectralDecomposition<Scalar>& d, double t) {
  const CMatrix v = d.eigenvectors.template cast<Complex>();
  CVector phases(d.size());
  for (Index k = 0; k < d.size(); ++k) phases(k) = std::exp(-kI * (d.eigenvalues(k) * t));
  return v * phases.asDiagonal() * v.adjoint();
}

/// e^{-i H t} psi = sum_k e^{-i lambda_k t} v_k <v_k|psi>.
template <typename Scalar>
CVector evolve_spectral(const SpectralDecomposition<Scalar>& d, double t, const CVector& psi) {
  if (psi.size() != d.size()) throw DimensionError("evolve_spectral: dimension mismatch");
  if (!std::isfinite(t)) throw ValidationError("evolve_spectral: non-finite time");
  const CMatrix v = d.eigenvectors.template cast<Complex>();
  CVector coeffs = v.adjoint() * psi;
  for (Index k = 0; k < d.size(); ++k) coeffs(k) *= std::exp(-kI * (d.eigenvalues(k) * t));
  return v * coeffs;
}

template <typename Scalar>
CVector evolve_spectral(const BasicHermitian<Scalar>& h, double t, const CVector& psi) {
  if (psi.size() != h.dim()) throw DimensionError("evolve_spectral: dimension mismatch");
  return evolve_spectral(hermitian_eig(h), t, psi);
}

/// Thin SVD, singular values descending.
inline SvdResult svd(const RMatrix& x) {
  if (x.size() == 0) throw DimensionError("svd: empty matrix");
  Eigen::BDCSVD<RMatrix> solver(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

namespace pauli {
inline CMatrix identity(Index dim = 2) { return CMatrix::Identity(dim, dim); }
inline CMatrix x() { return (CMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline CMatrix y() { return (CMatrix(2, 2) << 0, -kI, kI, 0).finished(); }
inline CMatrix z() { return (CMatrix(2, 2) << 1, 0, 0, -1).finished(); }
inline CMatrix hadamard() {
  return (CMatrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
}
}  // namespace pauli

/// Smallest q with 2^q >= n (0 for n == 1).
inline int qubits_for(Index n) {
  if (n < 1) throw ValidationError("qubits_for: size must be positive");
  int q = 0;
  while ((Index{1} << q) < n) ++q;
  return q;
}

}  // namespace qrdr
