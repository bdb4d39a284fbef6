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
#include "qrdr/adam.hpp"
#include "qrdr/mlp.hpp"

namespace {

using namespace qrdr;

TEST(Adam, FirstStepIsSignedLearningRate) {
  AdamConfig cfg;
  cfg.learning_rate = 0.05;
  Adam adam(3, cfg);
  RVector p(3);
  p << 1.0, 2.0, 3.0;
  RVector g(3);
  g << 0.3, -4.0, 1e-3;
  adam.step(p, g);
  EXPECT_NEAR(p(0), 1.0 - 0.05, 1e-6);
  EXPECT_NEAR(p(1), 2.0 + 0.05, 1e-6);
  EXPECT_NEAR(p(2), 3.0 - 0.05, 1e-4);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, MatchesReferenceRecursion) {
  AdamConfig cfg;
  Adam adam(1, cfg);
  RVector p = RVector::Constant(1, 0.5);
  double m = 0, v = 0, x = 0.5;
  for (int t = 1; t <= 10; ++t) {
    const double g = 2 * x;  // d/dx x^2
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    x -= cfg.learning_rate * (m / (1 - std::pow(cfg.beta1, t))) /
         (std::sqrt(v / (1 - std::pow(cfg.beta2, t))) + cfg.epsilon);
    adam.step(p, RVector::Constant(1, 2 * p(0)));
    EXPECT_NEAR(p(0), x, 1e-15);
  }
}

TEST(Adam, Validation) {
  AdamConfig bad;
  bad.learning_rate = 0;
  EXPECT_THROW(Adam(2, bad), ValidationError);
  Adam ok(2, AdamConfig{});
  RVector p = RVector::Zero(3);
  EXPECT_THROW(ok.step(p, RVector::Zero(3)), DimensionError);
}

TEST(Mlp, Shape) {
  const auto m = mlp::init_mlp(16, 1);
  EXPECT_EQ(m.weights.size(), 4u);
  EXPECT_EQ(m.inputs(), 16);
  EXPECT_EQ(m.parameter_count(), 16 * 128 + 128 + 2 * (128 * 128 + 128) + 128 + 1);
  EXPECT_THROW(mlp::init_mlp(0, 1), ValidationError);
  EXPECT_THROW(mlp::logit(m, RVector::Zero(3)), DimensionError);
}

TEST(Mlp, FlatRoundTripAndDeterministicInit) {
  auto a = mlp::init_mlp(4, 5);
  EXPECT_EQ(a.flat(), mlp::init_mlp(4, 5).flat());
  EXPECT_NE(a.flat(), mlp::init_mlp(4, 6).flat());
  RVector p = a.flat();
  p(7) = 42.0;
  a.set_flat(p);
  EXPECT_EQ(a.flat(), p);
}

TEST(Mlp, LogitMatchesManualForward) {
  CounterRng rng(2);
  const auto m = mlp::init_mlp(3, 2);
  const RVector x = oracle::random_matrix(3, 1, rng);
  std::vector<double> a(x.data(), x.data() + 3);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    std::vector<double> next(static_cast<std::size_t>(m.weights[l].rows()));
    for (Index o = 0; o < m.weights[l].rows(); ++o) {
      double s = m.biases[l](o);
      for (Index i = 0; i < m.weights[l].cols(); ++i) s += m.weights[l](o, i) * a[std::size_t(i)];
      next[std::size_t(o)] = l + 1 < m.weights.size() ? std::max(s, 0.0) : s;
    }
    a = next;
  }
  EXPECT_NEAR(mlp::logit(m, x), a[0], 1e-12);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  CounterRng rng(3);
  auto m = mlp::init_mlp(5, 3);
  RVector p = m.flat();
  for (Index i = 0; i < p.size(); ++i) p(i) += 0.05 * rng.normal();  // move biases off zero
  m.set_flat(p);
  const RMatrix x = oracle::random_matrix(6, 5, rng);
  const std::vector<int> y{1, -1, 1, 1, -1, -1};
  const auto lg = mlp::loss_and_grad(m, x, y);
  const double h = 1e-6;
  auto probe = m;
  for (int trial = 0; trial < 200; ++trial) {
    const Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(p.size())));
    RVector q = p;
    q(i) += h;
    probe.set_flat(q);
    const double up = mlp::loss_and_grad(probe, x, y).loss;
    q(i) -= 2 * h;
    probe.set_flat(q);
    const double dn = mlp::loss_and_grad(probe, x, y).loss;
    const double fd = (up - dn) / (2 * h);
    EXPECT_LE(std::abs(fd - lg.grad(i)), 1e-4 * std::max(1.0, std::abs(fd))) << i;
  }
}

TEST(Mlp, LearnsSeparableToy) {
  CounterRng rng(4);
  RMatrix x(60, 2);
  std::vector<int> y;
  for (Index i = 0; i < 60; ++i) {
    const int label = i % 2 ? 1 : -1;
    x(i, 0) = label * 1.0 + 0.3 * rng.normal();
    x(i, 1) = 0.3 * rng.normal();
    y.push_back(label);
  }
  auto m = mlp::init_mlp(2, 1);
  qcnn::TrainConfig cfg;
  cfg.batch_size = 10;
  cfg.epochs = 10;
  const auto h = mlp::train(m, x, y, x, y, cfg);
  EXPECT_EQ(h.arm, "mlp");
  EXPECT_LT(h.epochs.back().train_loss, h.epochs.front().train_loss);
  EXPECT_DOUBLE_EQ(h.epochs.back().train_accuracy, 1.0);
}

TEST(Mlp, TrainingIsDeterministic) {
  CounterRng rng(5);
  const RMatrix x = oracle::random_matrix(20, 3, rng);
  std::vector<int> y;
  for (Index i = 0; i < 20; ++i) y.push_back(x(i, 0) > 0 ? 1 : -1);
  qcnn::TrainConfig cfg;
  cfg.batch_size = 5;
  cfg.epochs = 2;
  auto a = mlp::init_mlp(3, 8);
  auto b = mlp::init_mlp(3, 8);
  mlp::train(a, x, y, x, y, cfg);
  mlp::train(b, x, y, x, y, cfg);
  EXPECT_EQ(a.flat(), b.flat());
}

TEST(Mlp, LossValidation) {
  const auto m = mlp::init_mlp(2, 1);
  EXPECT_THROW(mlp::loss_and_grad(m, RMatrix::Zero(2, 2), {1}), DimensionError);
}

}  // namespace
