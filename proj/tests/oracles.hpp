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

// Reference implementations used only as test oracles. They share no code
// with the library: plain loops over std::vector, no Eigen decompositions.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qrdr/rng.hpp"
#include "qrdr/tensor.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Dense = std::vector<std::vector<double>>;
using CDense = std::vector<std::vector<cplx>>;

inline Dense to_dense(const qrdr::RMatrix& m) {
  Dense d(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (qrdr::Index i = 0; i < m.rows(); ++i)
    for (qrdr::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline CDense to_cdense(const qrdr::CMatrix& m) {
  CDense d(static_cast<std::size_t>(m.rows()), std::vector<cplx>(static_cast<std::size_t>(m.cols())));
  for (qrdr::Index i = 0; i < m.rows(); ++i)
    for (qrdr::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

/// Cyclic Jacobi rotations on a real symmetric matrix; eigenvalues descending.
inline std::vector<double> jacobi_eigenvalues(Dense a, int sweeps = 100) {
  const std::size_t n = a.size();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - sn * akq;
          a[k][q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - sn * aqk;
          a[q][k] = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// Eigenvalues of a complex Hermitian matrix through its real 2n x 2n
/// embedding [[Re, -Im], [Im, Re]]; every eigenvalue appears twice there.
inline std::vector<double> hermitian_eigenvalues(const CDense& h) {
  const std::size_t n = h.size();
  Dense e(2 * n, std::vector<double>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      e[i][j] = h[i][j].real();
      e[i][j + n] = -h[i][j].imag();
      e[i + n][j] = h[i][j].imag();
      e[i + n][j + n] = h[i][j].real();
    }
  }
  const auto all = jacobi_eigenvalues(e);
  std::vector<double> out;
  for (std::size_t i = 0; i < all.size(); i += 2) out.push_back(all[i]);
  return out;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

inline CDense matmul(const CDense& a, const CDense& b) {
  const std::size_t n = a.size(), m = b[0].size(), k = b.size();
  CDense c(n, std::vector<cplx>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

/// exp(-i H t) by scaling and squaring of a truncated Taylor series.
inline CDense taylor_propagator(const CDense& h, double t) {
  const std::size_t n = h.size();
  double norm = 0;
  for (auto& row : h)
    for (auto v : row) norm = std::max(norm, std::abs(v));
  norm *= static_cast<double>(n) * std::abs(t);
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2;
    ++squarings;
  }
  const double dt = t / std::pow(2.0, squarings);
  CDense a(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = cplx(0, -dt) * h[i][j];
  CDense result(n, std::vector<cplx>(n)), term(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) result[i][i] = term[i][i] = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term = matmul(term, a);
    for (auto& row : term)
      for (auto& v : row) v /= static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

inline std::vector<cplx> apply(const CDense& m, const std::vector<cplx>& v) {
  std::vector<cplx> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline qrdr::RMatrix random_matrix(qrdr::Index rows, qrdr::Index cols, qrdr::CounterRng& rng) {
  qrdr::RMatrix x(rows, cols);
  for (qrdr::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

inline qrdr::CMatrix random_hermitian(qrdr::Index n, qrdr::CounterRng& rng) {
  qrdr::CMatrix m(n, n);
  for (qrdr::Index i = 0; i < m.size(); ++i) m.data()[i] = qrdr::Complex(rng.normal(), rng.normal());
  return 0.5 * (m + m.adjoint());
}

inline qrdr::CVector random_state(qrdr::Index n, qrdr::CounterRng& rng) {
  qrdr::CVector v(n);
  for (qrdr::Index i = 0; i < n; ++i) v(i) = qrdr::Complex(rng.normal(), rng.normal());
  return v.normalized();
}

}  // namespace oracle
