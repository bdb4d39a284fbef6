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
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qrdr/errors.hpp"
#include "qrdr/parallel.hpp"
#include "qrdr/rng.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

namespace tol {
/// Ground-state gaps below this are reported as near-degenerate.
inline constexpr double kGroundGap = 1e-10;
}  // namespace tol

/// Open chain, H = -J sum Z_i Z_{i+1} + h sum X_i. Site 0 is the most
/// significant bit of the basis index.
struct TfimSpec {
  int n_sites = 8;
  double j = 1.0;
  double h = 1.0;

  void validate() const {
    if (n_sites < 2 || n_sites > 14) throw ValidationError("tfim: n_sites must lie in [2, 14]");
    if (!(j > 0.0) || !std::isfinite(j)) throw ValidationError("tfim: J must be > 0");
    if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("tfim: h must be >= 0");
  }
  Index dim() const { return Index{1} << n_sites; }
};

inline SymmetricMatrix build_tfim(const TfimSpec& spec) {
  spec.validate();
  const Index dim = spec.dim();
  const int n = spec.n_sites;
  RMatrix h = RMatrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const int zi = ((s >> (n - 1 - i)) & 1) ? -1 : 1;
      const int zj = ((s >> (n - 2 - i)) & 1) ? -1 : 1;
      diag -= spec.j * zi * zj;
    }
    h(s, s) = diag;
    for (int i = 0; i < n; ++i) h(s ^ (Index{1} << (n - 1 - i)), s) += spec.h;
  }
  return SymmetricMatrix(std::move(h));
}

struct PhaseSample {
  double h_over_j = 0.0;
  int label = 0;  // +1 paramagnetic, -1 ferromagnetic
  RVector amplitudes;
  double energy = 0.0;
  double gap = 0.0;
  bool near_degenerate = false;
};

inline int phase_label(double h_over_j) { return h_over_j > 1.0 ? 1 : -1; }

inline PhaseSample ground_state(const TfimSpec& spec) {
  spec.validate();
  if (spec.h == 0.0) throw ValidationError("ground_state: h = 0 has an exactly degenerate ground state");
  const auto eig = hermitian_eig(build_tfim(spec));
  const Index last = eig.eigenvalues.size() - 1;
  PhaseSample s;
  s.h_over_j = spec.h / spec.j;
  s.label = phase_label(s.h_over_j);
  s.energy = eig.eigenvalues(last);
  s.gap = eig.eigenvalues(last - 1) - eig.eigenvalues(last);
  s.near_degenerate = s.gap < tol::kGroundGap;
  s.amplitudes = eig.eigenvectors.col(last);
  Index arg = 0;
  s.amplitudes.cwiseAbs().maxCoeff(&arg);
  if (s.amplitudes(arg) < 0) s.amplitudes = -s.amplitudes;
  return s;
}

/// <(sum_i Z_i / n)^2> in a real state.
inline double magnetization_squared(const RVector& psi, int n_sites) {
  double out = 0.0;
  for (Index s = 0; s < psi.size(); ++s) {
    const int up = std::popcount(static_cast<unsigned long long>(s));
    const double m = static_cast<double>(n_sites - 2 * up) / n_sites;
    out += psi(s) * psi(s) * m * m;
  }
  return out;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct TfimDataset {
  int n_sites = 8;
  double j = 1.0;
  std::uint64_t seed = 0;
  Interval ratio_range{0.2, 1.8};
  Interval exclusion{0.95, 1.05};
  std::vector<PhaseSample> samples;  // sorted by h/J

  /// Ground states as rows.
  RMatrix data_matrix() const {
    if (samples.empty()) throw ValidationError("tfim dataset is empty");
    RMatrix x(static_cast<Index>(samples.size()), samples.front().amplitudes.size());
    for (std::size_t i = 0; i < samples.size(); ++i) x.row(static_cast<Index>(i)) = samples[i].amplitudes.transpose();
    return x;
  }
  std::vector<int> labels() const {
    std::vector<int> out;
    for (const auto& s : samples) out.push_back(s.label);
    return out;
  }
};

/// count/2 ratios drawn uniformly from each side of the exclusion window.
inline TfimDataset generate_dataset(int n_sites, int count, Interval ratio_range, Interval exclusion,
                                    std::uint64_t seed, double j = 1.0, unsigned threads = 1) {
  if (count < 2 || count % 2 != 0) throw ValidationError("generate_dataset: count must be even and >= 2");
  if (!(ratio_range.lo > 0.0) || !(ratio_range.lo < ratio_range.hi)) {
    throw ValidationError("generate_dataset: ratio range must satisfy 0 < lo < hi");
  }
  if (!(exclusion.lo <= 1.0 && exclusion.hi >= 1.0)) {
    throw ValidationError("generate_dataset: exclusion window must contain 1");
  }
  const Interval ferro{ratio_range.lo, std::min(exclusion.lo, 1.0)};
  const Interval para{std::max(exclusion.hi, 1.0), ratio_range.hi};
  if (!(ferro.width() > 0.0) || !(para.width() > 0.0)) {
    throw ValidationError("generate_dataset: empty admissible range on one side of the transition");
  }
  CounterRng rng(seed, /*stream=*/0x7466696dULL);
  std::vector<double> ratios;
  for (int i = 0; i < count / 2; ++i) ratios.push_back(ferro.lo + ferro.width() * rng.uniform());
  for (int i = 0; i < count / 2; ++i) {
    // (lo, hi]: the paramagnetic side never lands on h/J = 1.
    ratios.push_back(para.hi - para.width() * rng.uniform());
  }
  std::sort(ratios.begin(), ratios.end());

  TfimDataset ds;
  ds.n_sites = n_sites;
  ds.j = j;
  ds.seed = seed;
  ds.ratio_range = ratio_range;
  ds.exclusion = exclusion;
  ds.samples.resize(ratios.size());
  parallel_for(ratios.size(), threads, [&](std::size_t i) {
    ds.samples[i] = ground_state(TfimSpec{n_sites, j, ratios[i] * j});
  });
  return ds;
}

inline void write_dataset(const TfimDataset& ds, std::ostream& out) {
  nlohmann::json header = {{"n_sites", ds.n_sites},
                           {"J", ds.j},
                           {"boundary", "open"},
                           {"seed", ds.seed},
                           {"count", ds.samples.size()},
                           {"ratio_range", {ds.ratio_range.lo, ds.ratio_range.hi}},
                           {"exclusion", {ds.exclusion.lo, ds.exclusion.hi}}};
  out << header.dump() << '\n';
  for (const auto& s : ds.samples) {
    nlohmann::json rec = {{"h_over_j", s.h_over_j},
                          {"label", s.label},
                          {"amplitudes", std::vector<double>(s.amplitudes.data(),
                                                             s.amplitudes.data() + s.amplitudes.size())}};
    out << rec.dump() << '\n';
  }
}

inline void write_dataset(const TfimDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_dataset(ds, out);
  if (!out) throw Error("write failed: " + path);
}

inline TfimDataset read_dataset(std::istream& in) {
  TfimDataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    try {
      if (!have_header) {
        ds.n_sites = rec.at("n_sites").get<int>();
        ds.j = rec.at("J").get<double>();
        ds.seed = rec.value("seed", std::uint64_t{0});
        if (rec.contains("ratio_range")) ds.ratio_range = {rec["ratio_range"][0], rec["ratio_range"][1]};
        if (rec.contains("exclusion")) ds.exclusion = {rec["exclusion"][0], rec["exclusion"][1]};
        if (rec.value("boundary", std::string("open")) != "open") {
          throw ParseError(lineno, "only open boundaries are supported");
        }
        have_header = true;
        continue;
      }
      PhaseSample s;
      s.h_over_j = rec.at("h_over_j").get<double>();
      s.label = rec.at("label").get<int>();
      const auto amps = rec.at("amplitudes").get<std::vector<double>>();
      if (amps.size() != (std::size_t{1} << ds.n_sites)) {
        throw ParseError(lineno, "expected " + std::to_string(std::size_t{1} << ds.n_sites) +
                                     " amplitudes, got " + std::to_string(amps.size()));
      }
      if (s.label != phase_label(s.h_over_j)) throw ParseError(lineno, "label inconsistent with h_over_j");
      s.amplitudes = Eigen::Map<const RVector>(amps.data(), static_cast<Index>(amps.size()));
      if (std::abs(s.amplitudes.norm() - 1.0) > 1e-8) throw ParseError(lineno, "amplitudes are not unit norm");
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError(lineno, "missing header record");
  return ds;
}

inline TfimDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_dataset(in);
}

}  // namespace qrdr
