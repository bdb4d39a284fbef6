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

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "qrdr/experiments.hpp"
#include "qrdr/resonance.hpp"

namespace {

using namespace qrdr;

TEST(TransitionProbability, FullTransferAtUnitTime) {
  for (double c : {0.001, 0.01, 0.3}) {
    EXPECT_NEAR(resonant_transition_probability(c, 1.0 / c), 1.0, 1e-15);
    EXPECT_NEAR(resonant_transition_probability(c, 0.5 / c), 0.5, 1e-15);
    EXPECT_EQ(resonant_transition_probability(c, 0.0), 0.0);
  }
  EXPECT_THROW(resonant_transition_probability(0.0, 1.0), ValidationError);
  EXPECT_THROW(resonant_transition_probability(0.1, -1.0), ValidationError);
}

TEST(OffResonance, Examples) {
  const double a = 0.01 * M_PI;
  EXPECT_NEAR(offresonance_amplitude({1.0, 1.0}, 0.01), a / std::sqrt(1.0 + a * a), 1e-15);
  EXPECT_EQ(offresonance_amplitude({0.0, 0.0}, 0.01), 0.0);
  EXPECT_THROW(offresonance_amplitude({1.0, 0.0}, 0.01), ValidationError);
  EXPECT_THROW(offresonance_amplitude({-1.0, 1.0}, 0.01), ValidationError);
}

TEST(OffResonance, BoundedByRatio) {
  for (double det : {0.1, 0.5, 2.0, -3.0})
    for (double c : {1e-4, 1e-2, 0.2}) EXPECT_LE(offresonance_amplitude({1.0, det}, c), c * M_PI / std::abs(det) + 1e-15);
}

TEST(OffResonance, MonotoneInDetuningAndCoupling) {
  double prev = 2.0;
  for (double det = 0.1; det < 10; det *= 1.5) {
    const double a = offresonance_amplitude({1.0, det}, 0.05);
    EXPECT_LT(a, prev);
    prev = a;
  }
  prev = 0.0;
  for (double g = 0.1; g < 10; g *= 1.5) {
    const double a = offresonance_amplitude({g, 1.0}, 0.05);
    EXPECT_GT(a, prev);
    prev = a;
  }
}

TEST(OffResonance, MatchesSimulatedTwoLevelPeak) {
  // H = [[0, -i g], [i g, Delta]], g = c pi delta / 2; scan t for the peak.
  for (auto [det, c] : std::vector<std::pair<double, double>>{{1.0, 0.05}, {0.3, 0.02}, {2.0, 0.3}}) {
    const double g = c * M_PI / 2.0;
    oracle::CDense h{{0.0, -oracle::cplx(0, 1) * g}, {oracle::cplx(0, 1) * g, det}};
    const double omega = std::sqrt(det * det + 4 * g * g);
    const double t_peak = M_PI / omega;
    const auto u = oracle::taylor_propagator(h, t_peak);
    const double peak = std::abs(u[1][0]);
    EXPECT_NEAR(peak, offresonance_amplitude({1.0, det}, c), 1e-10);
    double best = 0;
    for (int s = 0; s <= 200; ++s) best = std::max(best, std::abs(oracle::taylor_propagator(h, t_peak * s / 100.0)[1][0]));
    EXPECT_LE(best, peak + 1e-10);
  }
}

TEST(AlphaBound, SingleLevelIsOne) {
  const auto b = alpha_lower_bound({3.0}, 0, 0.01);
  EXPECT_EQ(b.rigorous, 1.0);
  EXPECT_EQ(b.certificate(), 1.0);
}

TEST(AlphaBound, EquallySpacedSpectrum) {
  std::vector<double> levels;
  for (int k = 0; k < 8; ++k) levels.push_back(10.0 - k);
  const double c = 0.01;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto b = alpha_lower_bound(levels, k, c);
    EXPECT_GE(b.certificate(), 1.0 - std::pow(M_PI / 100.0, 2) * M_PI * M_PI / 3.0);
    EXPECT_NEAR(b.rigorous, b.index_form, 1e-15);
  }
}

TEST(AlphaBound, Validation) {
  EXPECT_THROW(alpha_lower_bound({1.0, 1.0}, 0, 0.1), ValidationError);
  EXPECT_THROW(alpha_lower_bound({1.0}, 1, 0.1), ValidationError);
  EXPECT_THROW(alpha_lower_bound({1.0, 2.0}, 0, 0.0), ValidationError);
}

TEST(AlphaBound, SimulatedRetainedAmplitudeRespectsBound) {
  // Spectrum well inside the unit gap of the vacuum ancilla levels, which the
  // spectral bound does not count.
  CounterRng rng(5);
  RMatrix x = oracle::random_matrix(20, 8, rng);
  x *= std::sqrt(0.05 / fit_pca(x, 1).eigenvalues(0));
  const auto p = prepare_qrdr(x, 4);
  RegisterLayout lay = p.layout;
  lay.samples = 1;
  const double dm = delta_min(p);
  const double c = dm / 50;
  const auto h = build_hamiltonian(p.pca, lay, c);
  std::vector<double> levels(p.pca.eigenvalues.data(), p.pca.eigenvalues.data() + 4);
  for (Index k = 0; k < 4; ++k) {
    CVector in = CVector::Zero(lay.local_dim());
    CVector want = CVector::Zero(lay.local_dim());
    for (Index d = 0; d < 8; ++d) {
      in(lay.index(0, 0, d, 0)) = p.pca.components(k, d);
      want(lay.index(1, k, d, 0)) = p.pca.components(k, d);
    }
    const double alpha2 = std::norm(want.dot(evolve_blockwise(h, in)));
    EXPECT_GE(alpha2, alpha_lower_bound(levels, static_cast<std::size_t>(k), c).certificate()) << k;
  }
}

TEST(LinearFit, ExactLine) {
  const auto f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-15);
  EXPECT_NEAR(f.intercept, 1.0, 1e-15);
  EXPECT_NEAR(f.correlation, 1.0, 1e-15);
  EXPECT_NEAR(linear_fit({0, 1, 2}, {3, 2, 1}).correlation, -1.0, 1e-15);
  EXPECT_THROW(linear_fit({1}, {1}), ValidationError);
  EXPECT_THROW(linear_fit({1, 2}, {1}), ValidationError);
}

TEST(Sweep, DefaultGridDoubles) {
  const auto g = default_c_grid();
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g.front(), 0.001);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_DOUBLE_EQ(g[i], 2 * g[i - 1]);
}

TEST(Sweep, QuadraticLawOnRandomData) {
  CounterRng rng(9);
  const auto p = prepare_qrdr(oracle::random_matrix(24, 8, rng), 4);
  const double dm = delta_min(p);
  std::vector<double> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(dm / 400 * std::pow(2.0, i));
  QrdrOptions opts;
  opts.threads = 2;
  const auto r = sweep_c(p, grid, opts);
  ASSERT_EQ(r.points.size(), 5u);
  EXPECT_FALSE(r.degenerate_fit);
  EXPECT_GE(r.correlation, 0.99);
  EXPECT_NEAR(r.epsilon_slope, 2.0, 0.1);
  EXPECT_NEAR(r.slope, 1.0, 0.05);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    EXPECT_GT(r.points[i].c, r.points[i - 1].c);
    EXPECT_GT(r.points[i].epsilon, r.points[i - 1].epsilon);
  }
}

TEST(Sweep, InadmissiblePointsAreSkipped) {
  CounterRng rng(10);
  const auto p = prepare_qrdr(oracle::random_matrix(12, 6, rng), 2);
  const double dm = delta_min(p);
  const auto r = sweep_c(p, {dm * 2, dm / 200, dm / 100});
  EXPECT_EQ(r.points.size(), 2u);
  ASSERT_EQ(r.skipped.size(), 1u);
  EXPECT_EQ(r.skipped[0].first, dm * 2);
}

TEST(Sweep, RankOneDataGivesDegenerateFit) {
  CounterRng rng(11);
  const RMatrix x = oracle::random_matrix(10, 1, rng) * oracle::random_matrix(1, 4, rng);
  const auto r = sweep_c(x, 1, {0.001, 0.002, 0.004});
  EXPECT_TRUE(r.degenerate_fit);
  EXPECT_EQ(r.below_floor, 3u);
  EXPECT_TRUE(std::isnan(r.slope));
}

TEST(Sweep, CsvLayout) {
  SweepResult r;
  r.points = {{0.001, 1e-6, 0.9}, {0.002, 4e-6, 0.8}};
  std::ostringstream out;
  write_sweep_csv(r, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "c,epsilon,success_probability");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

}  // namespace
