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
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qrdr/engine.hpp"
#include "qrdr/errors.hpp"
#include "qrdr/parallel.hpp"

namespace qrdr {

/// Two levels |0,0,v_k> and |1,j,v_k'>: coupling carries the Kronecker factor
/// delta_kk', detuning is lambda_k' - lambda_j.
struct TwoLevelSystem {
  double coupling = 0.0;
  double detuning = 0.0;
};

/// Population of |1,k,v_k> after time t on exact resonance: sin^2(c pi t / 2).
inline double resonant_transition_probability(double c, double t) {
  if (!(c > 0.0) || t < 0.0) throw ValidationError("resonant_transition_probability: need c > 0, t >= 0");
  const double s = std::sin(c * M_PI * t / 2.0);
  return s * s;
}

/// Peak off-resonant amplitude c pi delta / sqrt((c pi delta)^2 + Delta^2),
/// never larger than c pi / |Delta|.
inline double offresonance_amplitude(const TwoLevelSystem& sys, double c) {
  if (sys.coupling < 0.0) throw ValidationError("offresonance_amplitude: coupling must be >= 0");
  const double drive = c * M_PI * sys.coupling;
  if (drive == 0.0) return 0.0;
  if (sys.detuning == 0.0) {
    throw ValidationError("offresonance_amplitude: zero detuning with nonzero coupling is the resonant case");
  }
  return drive / std::sqrt(drive * drive + sys.detuning * sys.detuning);
}

struct AlphaBound {
  double rigorous = 1.0;    // 1 - (c pi)^2 sum_{j!=k} 1/|lambda_j - lambda_k|^2
  double index_form = 1.0;  // 1 - (c pi / Delta_min)^2 sum_{j!=k} 1/|j - k|^2
  /// The larger of the two; both are valid lower bounds on |alpha_k|^2 for a
  /// sorted, distinct spectrum.
  double certificate() const { return std::max(rigorous, index_form); }
};

/// Lower bound on the retained amplitude |alpha_k|^2 of level k among the
/// retained levels `spectrum` (distinct values).
inline AlphaBound alpha_lower_bound(const std::vector<double>& spectrum, std::size_t k, double c) {
  if (k >= spectrum.size()) throw ValidationError("alpha_lower_bound: k out of range");
  if (!(c > 0.0)) throw ValidationError("alpha_lower_bound: c must be > 0");
  double delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < spectrum.size(); ++a) {
    for (std::size_t b = a + 1; b < spectrum.size(); ++b) {
      delta_min = std::min(delta_min, std::abs(spectrum[a] - spectrum[b]));
    }
  }
  if (delta_min <= 0.0) throw ValidationError("alpha_lower_bound: degenerate spectrum");
  AlphaBound out;
  double by_gap = 0.0;
  double by_index = 0.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    if (j == k) continue;
    const double gap = spectrum[j] - spectrum[k];
    const double dist = static_cast<double>(j > k ? j - k : k - j);
    by_gap += 1.0 / (gap * gap);
    by_index += 1.0 / (dist * dist);
  }
  const double cp = c * M_PI;
  out.rigorous = 1.0 - cp * cp * by_gap;
  if (by_index > 0.0) out.index_form = 1.0 - (cp / delta_min) * (cp / delta_min) * by_index;
  return out;
}

struct SweepPoint {
  double c = 0.0;
  double epsilon = 0.0;
  double success_probability = 0.0;
};

struct SweepResult {
  int retained = 0;
  std::vector<SweepPoint> points;  // sorted by c
  std::vector<std::pair<double, std::string>> skipped;
  std::vector<std::string> warnings;
  /// Linear fit of log(1/sqrt(eps)) against log(1/c).
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double correlation = std::numeric_limits<double>::quiet_NaN();
  /// Least-squares slope of log(eps) against log(c); 2 for the c^2 law.
  double epsilon_slope = std::numeric_limits<double>::quiet_NaN();
  std::size_t below_floor = 0;
  /// Fewer than two points survived the floor.
  bool degenerate_fit = false;
};

namespace tol {
/// Errors below this are excluded from log-log fits.
inline constexpr double kEpsilonFloor = 1e-12;
}  // namespace tol

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("linear_fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.correlation = (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : 0.0;
  return f;
}

/// The doubling grid 0.001, 0.002, ..., 0.032.
inline std::vector<double> default_c_grid() { return {0.001, 0.002, 0.004, 0.008, 0.016, 0.032}; }

inline SweepResult sweep_c(const QrdrProblem& problem, std::vector<double> c_values,
                           const QrdrOptions& options = {}) {
  std::sort(c_values.begin(), c_values.end());
  std::vector<std::optional<QrdrOutcome>> outcomes(c_values.size());
  std::vector<std::string> failures(c_values.size());
  QrdrOptions inner = options;
  inner.threads = 1;
  parallel_for(c_values.size(), options.threads, [&](std::size_t i) {
    try {
      outcomes[i] = run_qrdr(problem, c_values[i], inner);
    } catch (const AdmissibilityError& e) {
      failures[i] = e.what();
    } catch (const ValidationError& e) {
      failures[i] = e.what();
    }
  });

  SweepResult result;
  result.retained = static_cast<int>(problem.retained());
  std::vector<double> log_inv_c, log_inv_sqrt_eps, log_c, log_eps;
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    if (!outcomes[i]) {
      result.skipped.emplace_back(c_values[i], failures[i]);
      result.warnings.push_back("skipped c = " + std::to_string(c_values[i]) + ": " + failures[i]);
      continue;
    }
    const QrdrOutcome& o = *outcomes[i];
    for (const auto& w : o.warnings) result.warnings.push_back(w);
    result.points.push_back({o.c, o.epsilon, o.success_probability});
    if (o.epsilon < tol::kEpsilonFloor) {
      ++result.below_floor;
      continue;
    }
    log_inv_c.push_back(std::log(1.0 / o.c));
    log_inv_sqrt_eps.push_back(std::log(1.0 / std::sqrt(o.epsilon)));
    log_c.push_back(std::log(o.c));
    log_eps.push_back(std::log(o.epsilon));
  }
  if (log_c.size() < 2) {
    result.degenerate_fit = true;
    return result;
  }
  const LinearFit f = linear_fit(log_inv_c, log_inv_sqrt_eps);
  result.slope = f.slope;
  result.intercept = f.intercept;
  result.correlation = f.correlation;
  result.epsilon_slope = linear_fit(log_c, log_eps).slope;
  return result;
}

inline SweepResult sweep_c(const RMatrix& x, int retained, std::vector<double> c_values,
                           const QrdrOptions& options = {}) {
  return sweep_c(prepare_qrdr(x, retained), std::move(c_values), options);
}

/// CSV rows (c, epsilon, success_probability).
inline void write_sweep_csv(const SweepResult& r, std::ostream& out) {
  out << "c,epsilon,success_probability\n";
  out.precision(17);
  for (const auto& p : r.points) out << p.c << ',' << p.epsilon << ',' << p.success_probability << '\n';
}

}  // namespace qrdr
