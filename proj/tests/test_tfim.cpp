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
#include "qrdr/tfim.hpp"

namespace {

using namespace qrdr;
using oracle::Dense;

Dense dkron(const Dense& a, const Dense& b) {
  Dense out(a.size() * b.size(), std::vector<double>(a[0].size() * b[0].size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t l = 0; l < b[0].size(); ++l) out[i * b.size() + k][j * b[0].size() + l] = a[i][j] * b[k][l];
  return out;
}

/// Operator `op` on `site`, identity elsewhere; site 0 is the leftmost factor.
Dense embed(const std::vector<std::pair<int, Dense>>& ops, int n) {
  const Dense id{{1, 0}, {0, 1}};
  Dense out{{1}};
  for (int s = 0; s < n; ++s) {
    Dense f = id;
    for (const auto& [site, op] : ops)
      if (site == s) f = op;
    out = dkron(out, f);
  }
  return out;
}

/// -J sum Z_i Z_{i+1} + h sum X_i from Pauli Kronecker strings.
Dense brute_tfim(int n, double j, double h) {
  const Dense z{{1, 0}, {0, -1}};
  const Dense x{{0, 1}, {1, 0}};
  const std::size_t dim = std::size_t{1} << n;
  Dense out(dim, std::vector<double>(dim, 0.0));
  auto add = [&](const Dense& term, double w) {
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) out[a][b] += w * term[a][b];
  };
  for (int i = 0; i + 1 < n; ++i) add(embed({{i, z}, {i + 1, z}}, n), -j);
  for (int i = 0; i < n; ++i) add(embed({{i, x}}, n), h);
  return out;
}

TEST(Tfim, MatchesPauliStrings) {
  for (int n : {2, 3, 4})
    for (double h : {0.0, 0.5, 1.0, 2.0}) {
      const RMatrix got = build_tfim({n, 1.3, h}).matrix();
      const Dense want = brute_tfim(n, 1.3, h);
      for (std::size_t a = 0; a < want.size(); ++a)
        for (std::size_t b = 0; b < want.size(); ++b) EXPECT_EQ(got(Index(a), Index(b)), want[a][b]);
    }
}

TEST(Tfim, TwoSiteClassicalSpectrum) {
  const auto ev = oracle::jacobi_eigenvalues(oracle::to_dense(build_tfim({2, 1.0, 0.0}).matrix()));
  std::vector<double> sorted = ev;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(sorted[0], -1.0, 1e-12);
  EXPECT_NEAR(sorted[1], -1.0, 1e-12);
  EXPECT_NEAR(sorted[2], 1.0, 1e-12);
  EXPECT_NEAR(sorted[3], 1.0, 1e-12);
}

TEST(Tfim, GroundEnergyMatchesBruteForce) {
  for (int n : {2, 4})
    for (double h : {0.5, 1.0, 2.0}) {
      const auto ev = oracle::jacobi_eigenvalues(brute_tfim(n, 1.0, h));
      const double want = *std::min_element(ev.begin(), ev.end());
      const auto gs = ground_state({n, 1.0, h});
      EXPECT_NEAR(gs.energy, want, 1e-10) << n << " " << h;
      const RVector hv = build_tfim({n, 1.0, h}).matrix() * gs.amplitudes;
      EXPECT_LE((hv - gs.energy * gs.amplitudes).norm(), 1e-10);
      EXPECT_NEAR(gs.amplitudes.norm(), 1.0, 1e-12);
    }
}

TEST(Tfim, SpinFlipSymmetry) {
  const int n = 5;
  const RMatrix h = build_tfim({n, 1.0, 0.7}).matrix();
  const Index dim = h.rows();
  RMatrix p = RMatrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) p(s ^ (dim - 1), s) = 1.0;
  EXPECT_LE(max_abs(RMatrix(h * p - p * h)), 1e-14);
  const auto gs = ground_state({n, 1.0, 0.7});
  // +h X selects flip parity (-1)^n.
  EXPECT_LE((p * gs.amplitudes + gs.amplitudes).norm(), 1e-9);
  const auto even = ground_state({4, 1.0, 0.7});
  RMatrix p4 = RMatrix::Zero(16, 16);
  for (Index s = 0; s < 16; ++s) p4(s ^ 15, s) = 1.0;
  EXPECT_LE((p4 * even.amplitudes - even.amplitudes).norm(), 1e-9);
}

TEST(Tfim, SignConvention) {
  const auto gs = ground_state({4, 1.0, 0.6});
  Index arg = 0;
  gs.amplitudes.cwiseAbs().maxCoeff(&arg);
  EXPECT_GT(gs.amplitudes(arg), 0.0);
}

TEST(Tfim, StrongFieldApproachesMinusProduct) {
  // +h X favors X = -1 on every site.
  const int n = 4;
  const auto gs = ground_state({n, 1.0, 50.0});
  RVector minus(16);
  for (Index s = 0; s < 16; ++s) minus(s) = (std::popcount(static_cast<unsigned>(s)) % 2 ? -1.0 : 1.0) / 4.0;
  EXPECT_GE(std::pow(minus.dot(gs.amplitudes), 2), 0.99);
}

TEST(Tfim, WeakFieldIsOrdered) {
  const auto gs = ground_state({6, 1.0, 0.05});
  EXPECT_GE(magnetization_squared(gs.amplitudes, 6), 0.8);
  const auto para = ground_state({6, 1.0, 5.0});
  EXPECT_LT(magnetization_squared(para.amplitudes, 6), 0.5);
}

TEST(Tfim, EnergyDecreasesWithField) {
  double prev = 0.0;
  for (double h = 0.1; h < 3.0; h += 0.2) {
    const double e = ground_state({4, 1.0, h}).energy;
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Tfim, Validation) {
  EXPECT_THROW(build_tfim({1, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(build_tfim({15, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(build_tfim({4, 0.0, 1.0}), ValidationError);
  EXPECT_THROW(build_tfim({4, 1.0, -1.0}), ValidationError);
  EXPECT_THROW(ground_state({4, 1.0, 0.0}), ValidationError);
}

TEST(Tfim, PhaseLabels) {
  EXPECT_EQ(phase_label(0.5), -1);
  EXPECT_EQ(phase_label(1.0), -1);
  EXPECT_EQ(phase_label(1.5), 1);
}

TEST(TfimDataset, BalancedSortedAndOutsideExclusion) {
  const auto ds = generate_dataset(4, 40, {0.2, 1.8}, {0.95, 1.05}, 3, 1.0, 2);
  ASSERT_EQ(ds.samples.size(), 40u);
  int pos = 0;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& s = ds.samples[i];
    pos += s.label > 0;
    EXPECT_GE(s.h_over_j, 0.2);
    EXPECT_LE(s.h_over_j, 1.8);
    EXPECT_FALSE(s.h_over_j > 0.95 && s.h_over_j < 1.05);
    EXPECT_EQ(s.label, phase_label(s.h_over_j));
    if (i) EXPECT_GE(s.h_over_j, ds.samples[i - 1].h_over_j);
  }
  EXPECT_EQ(pos, 20);
  EXPECT_EQ(ds.data_matrix().rows(), 40);
  EXPECT_EQ(ds.data_matrix().cols(), 16);
}

TEST(TfimDataset, Deterministic) {
  const auto a = generate_dataset(3, 10, {0.2, 1.8}, {0.9, 1.1}, 5, 1.0, 1);
  const auto b = generate_dataset(3, 10, {0.2, 1.8}, {0.9, 1.1}, 5, 1.0, 3);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a.samples[i].h_over_j, b.samples[i].h_over_j);
    EXPECT_EQ(a.samples[i].amplitudes, b.samples[i].amplitudes);
  }
  const auto c = generate_dataset(3, 10, {0.2, 1.8}, {0.9, 1.1}, 6);
  EXPECT_NE(a.samples[0].h_over_j, c.samples[0].h_over_j);
}

TEST(TfimDataset, Validation) {
  EXPECT_THROW(generate_dataset(3, 3, {0.2, 1.8}, {0.9, 1.1}, 1), ValidationError);
  EXPECT_THROW(generate_dataset(3, 4, {1.8, 0.2}, {0.9, 1.1}, 1), ValidationError);
  EXPECT_THROW(generate_dataset(3, 4, {0.2, 1.8}, {1.1, 1.2}, 1), ValidationError);
  EXPECT_THROW(generate_dataset(3, 4, {0.2, 0.9}, {0.95, 1.05}, 1), ValidationError);
}

TEST(TfimDataset, JsonlRoundTrip) {
  const auto ds = generate_dataset(3, 6, {0.2, 1.8}, {0.95, 1.05}, 8);
  std::stringstream buf;
  write_dataset(ds, buf);
  const std::string text = buf.str();
  const auto back = read_dataset(buf);
  EXPECT_EQ(back.n_sites, 3);
  EXPECT_EQ(back.seed, 8u);
  ASSERT_EQ(back.samples.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back.samples[i].h_over_j, ds.samples[i].h_over_j);
    EXPECT_EQ(back.samples[i].amplitudes, ds.samples[i].amplitudes);
  }
  std::stringstream again;
  write_dataset(back, again);
  EXPECT_EQ(again.str(), text);
}

std::size_t parse_failure_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_dataset(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(TfimDataset, ParseErrorsCarryLineNumbers) {
  const std::string header = R"({"n_sites":2,"J":1.0,"boundary":"open","seed":1})";
  const std::string good = R"({"h_over_j":0.5,"label":-1,"amplitudes":[1,0,0,0]})";
    EXPECT_EQ(parse_failure_line(header + "\n" + good + "\n{bad\n"), 3u);
  EXPECT_EQ(parse_failure_line(header + "\n" + R"({"h_over_j":0.5,"label":-1,"amplitudes":[1,0]})"), 2u);
  EXPECT_EQ(parse_failure_line(header + "\n" + R"({"h_over_j":0.5,"label":1,"amplitudes":[1,0,0,0]})"), 2u);
  EXPECT_EQ(parse_failure_line(header + "\n" + R"({"h_over_j":0.5,"label":-1,"amplitudes":[1,1,0,0]})"), 2u);
  EXPECT_EQ(parse_failure_line(R"({"n_sites":2,"J":1.0,"boundary":"periodic"})"), 1u);
  EXPECT_EQ(parse_failure_line(header + "\n" + good + "\n"), 0u);
}

TEST(TfimDataset, EmptyStreamHasNoHeader) {
  std::istringstream in("");
  EXPECT_THROW(read_dataset(in), ParseError);
}

}  // namespace
