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

#include "oracles.hpp"
#include "qrdr/experiments.hpp"

namespace {

using namespace qrdr;

TEST(CSetting, Formatting) {
  EXPECT_TRUE(CSetting::automatic().is_auto());
  EXPECT_EQ(CSetting::automatic().to_string(), "auto");
  EXPECT_EQ(CSetting::fixed(0.004).to_string(), "0.004");
}

TEST(CSetting, AutoIsHundredthOfGap) {
  CounterRng rng(1);
  const auto p = prepare_qrdr(oracle::random_matrix(10, 6, rng), 2);
  const double gap = build_hamiltonian(p.pca, p.layout, 1e-9).delta_min;
  EXPECT_DOUBLE_EQ(delta_min(p), gap);
  EXPECT_DOUBLE_EQ(resolve_c(p, CSetting::automatic()), gap / 100);
  EXPECT_DOUBLE_EQ(resolve_c(p, CSetting::fixed(0.3)), 0.3);
}

TEST(Reducer, QrdrFeaturesTrackPca) {
  CounterRng rng(2);
  const RMatrix x = oracle::random_matrix(16, 8, rng);
  const RMatrix z = qrdr_reducer(CSetting::automatic())(x, 4);
  ASSERT_EQ(z.rows(), 16);
  ASSERT_EQ(z.cols(), 4);
  const RMatrix ref = project(x, fit_pca(x, 4)).z;
  // Column signs are global phases of the output state.
  for (Index k = 0; k < 4; ++k) {
    const double s = z.col(k).dot(ref.col(k)) >= 0 ? 1.0 : -1.0;
    EXPECT_LE((s * z.col(k) - ref.col(k)).cwiseAbs().maxCoeff(), 1e-2 * ref.cwiseAbs().maxCoeff()) << k;
  }
}

TEST(Phase, ArmsShareSplitAndRun) {
  const auto ds = generate_dataset(4, 20, {0.2, 1.8}, {0.95, 1.05}, 3);
  PhaseConfig cfg;
  cfg.retained = 4;
  cfg.test_count = 6;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 7;
  const auto in = prepare_phase_inputs(ds, cfg);
  EXPECT_EQ(in.reduced_states.states.front().size(), 4);
  EXPECT_EQ(in.raw_states.states.front().size(), 16);
  EXPECT_EQ(in.reduced_features.cols(), 4);
  const auto run = run_phase_arms(in, cfg, 11);
  ASSERT_EQ(run.arms.size(), 4u);
  for (const char* arm : {"qcnn+qrdr", "qcnn", "mlp+dr", "mlp"}) EXPECT_EQ(run.arm(arm).epochs.size(), 2u);
  EXPECT_THROW(run.arm("none"), ValidationError);
  EXPECT_TRUE(run.models.contains("qcnn"));
  const auto again = run_phase_arms(in, cfg, 11);
  EXPECT_EQ(nlohmann::json(again.arms).dump(), nlohmann::json(run.arms).dump());
}

}  // namespace
