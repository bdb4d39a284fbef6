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

// Classical PCA: the ground truth every QRDR output is compared against.

#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "qrdr/errors.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

namespace tol {
/// Adjacent eigenvalues closer than this (relative to max(1, lambda_1)) are ties.
inline constexpr double kDegenerate = 1e-9;
/// Eigenvalues at or below this fraction of lambda_1 are numerically null.
inline constexpr double kNullLevel = 1e-10;
}  // namespace tol

/// A = X^T X, symmetrized against rounding.
inline SymmetricMatrix covariance(const RMatrix& x) {
  if (x.rows() < 1 || x.cols() < 1) throw ValidationError("covariance: empty data matrix");
  return SymmetricMatrix::symmetrized(x.transpose() * x);
}

struct PcaModel {
  RVector eigenvalues;  // all N, descending
  RMatrix components;   // N x N, row k is v_k
  int retained = 0;     // R
  double variance_fraction = 0.0;
  /// Some adjacent pair of significant eigenvalues is tied.
  bool degenerate = false;
  /// A tie touches the resonance levels: within the top R or across the
  /// R / R+1 boundary. QRDR refuses such models.
  bool degenerate_at_boundary = false;
  std::vector<int> tied_pairs;  // k such that lambda_k ~ lambda_{k+1}

  Index features() const noexcept { return components.cols(); }

  RMatrix projection() const { return components.topRows(retained); }

  double null_floor() const {
    return eigenvalues.size() == 0 ? 0.0 : tol::kNullLevel * std::max(eigenvalues(0), 0.0);
  }

  bool is_null_level(Index k) const { return eigenvalues(k) <= null_floor(); }
};

inline void to_json(nlohmann::json& j, const PcaModel& m) {
  j = nlohmann::json{{"R", m.retained},
                     {"variance_fraction", m.variance_fraction},
                     {"eigenvalues", std::vector<double>(m.eigenvalues.data(),
                                                         m.eigenvalues.data() + m.eigenvalues.size())},
                     {"degenerate", m.degenerate}};
}

namespace detail {

/// Largest-magnitude component positive, ties to the lowest index.
template <typename Derived>
void fix_sign(Eigen::MatrixBase<Derived>&& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12)) best = i;
  }
  if (v(best) < 0) v = -v;
}

}  // namespace detail

inline PcaModel fit_pca(const RMatrix& x, int r) {
  if (r < 1 || r > x.cols()) {
    throw ValidationError("fit_pca: R must lie in [1, " + std::to_string(x.cols()) + "], got " +
                          std::to_string(r));
  }
  const auto decomposition = hermitian_eig(covariance(x));
  PcaModel m;
  m.retained = r;
  m.eigenvalues = decomposition.eigenvalues.cwiseMax(0.0);
  m.components = decomposition.eigenvectors.transpose();
  for (Index k = 0; k < m.components.rows(); ++k) detail::fix_sign(m.components.row(k));

  const double total = m.eigenvalues.sum();
  m.variance_fraction = total > 0 ? m.eigenvalues.head(r).sum() / total : 1.0;
  m.variance_fraction = std::clamp(m.variance_fraction, 0.0, 1.0);

  const double tie = tol::kDegenerate * std::max(1.0, m.eigenvalues(0));
  for (Index k = 0; k + 1 < m.eigenvalues.size(); ++k) {
    if (m.is_null_level(k + 1)) break;
    if (m.eigenvalues(k) - m.eigenvalues(k + 1) <= tie) {
      m.degenerate = true;
      m.tied_pairs.push_back(static_cast<int>(k));
      if (k < r) m.degenerate_at_boundary = true;
    }
  }
  return m;
}

/// Z = X V_R^T, one reduced sample per row.
struct ReducedData {
  RMatrix z;
};

inline ReducedData project(const RMatrix& x, const PcaModel& m) {
  if (x.cols() != m.features()) {
    throw DimensionError("project: data has " + std::to_string(x.cols()) +
                         " features, model expects " + std::to_string(m.features()));
  }
  return ReducedData{x * m.projection().transpose()};
}

/// sum_{i,j} z_i^j |j>|i> / ||Z||_F with basis index j * M + i.
inline CVector target_state(const ReducedData& reduced) {
  const RMatrix& z = reduced.z;
  const double norm = z.norm();
  if (!(norm > 0.0)) throw ValidationError("target_state: Z is zero, state is not normalizable");
  const Index m = z.rows();
  CVector out(z.size());
  for (Index j = 0; j < z.cols(); ++j) {
    for (Index i = 0; i < m; ++i) out(j * m + i) = z(i, j) / norm;
  }
  return out;
}

}  // namespace qrdr
