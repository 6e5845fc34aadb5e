// Copyright 2026 The vgrounding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vgrounding/optimizer.hpp"

#include <random>

#include <gtest/gtest.h>

#include "vgrounding/error.hpp"

namespace vgrounding {
namespace {

GradientSet zero_grads(const TransformModel& m) {
  return {Matrix(m.d_img(), m.d_txt()), std::vector<double>(m.d_img(), 0.0)};
}

TEST(LearningRateTest, DefaultScheduleValues) {
  const OptimizerConfig cfg;
  EXPECT_EQ(learning_rate(cfg, 0), 0.01);
  EXPECT_EQ(learning_rate(cfg, 3), 0.01);
  EXPECT_EQ(learning_rate(cfg, 4), 0.001);
  EXPECT_EQ(learning_rate(cfg, 19), 1e-6);
}

TEST(LearningRateTest, PiecewiseConstantNonIncreasing) {
  OptimizerConfig cfg;
  cfg.epochs = 23;
  cfg.decay_every_epochs = 5;
  int plateaus = 1;
  for (int e = 1; e < cfg.epochs; ++e) {
    EXPECT_LE(learning_rate(cfg, e), learning_rate(cfg, e - 1));
    if (learning_rate(cfg, e) != learning_rate(cfg, e - 1)) ++plateaus;
  }
  EXPECT_EQ(plateaus, (cfg.epochs + cfg.decay_every_epochs - 1) / cfg.decay_every_epochs);
}

TEST(StepTest, NesterovTwoStepTraceOnQuadratic) {
  // f(theta) = 0.5 |theta|^2 with theta = W (1 x 2); grad = theta.
  TransformModel m(1, 2);
  m.weight(0, 0) = 1.0;
  m.weight(0, 1) = 1.0;
  OptimizerState state = OptimizerState::zeros_like(m);
  OptimizerConfig cfg;
  cfg.lr0 = 0.1;
  cfg.momentum = 0.9;
  cfg.weight_decay = 0.0;

  // Hand-executed: v1 = 1, theta1 = 1 - 0.1 (1 + 0.9) = 0.81;
  // v2 = 0.9 + 0.81 = 1.71, theta2 = 0.81 - 0.1 (0.81 + 0.9 * 1.71) = 0.5751.
  const double expected[2] = {0.81, 0.5751};
  for (int s = 0; s < 2; ++s) {
    GradientSet g = zero_grads(m);
    g.d_weight(0, 0) = m.weight(0, 0);
    g.d_weight(0, 1) = m.weight(0, 1);
    step(m, state, g, cfg, 0);
    EXPECT_NEAR(m.weight(0, 0), expected[s], 1e-12);
    EXPECT_NEAR(m.weight(0, 1), expected[s], 1e-12);
  }
  EXPECT_EQ(state.step_count, 2u);
}

TEST(StepTest, NoMomentumNoDecayIsPlainSgd) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  TransformModel m(3, 4);
  for (double& w : m.weight.values()) w = n(rng);
  for (double& b : m.bias) b = n(rng);
  GradientSet g = zero_grads(m);
  for (double& v : g.d_weight.values()) v = n(rng);
  for (double& v : g.d_bias) v = n(rng);

  OptimizerConfig cfg;
  cfg.momentum = 0.0;
  cfg.weight_decay = 0.0;
  TransformModel expected = m;
  const double lr = learning_rate(cfg, 5);
  for (std::size_t i = 0; i < expected.weight.size(); ++i) {
    expected.weight.values()[i] -= lr * g.d_weight.values()[i];
  }
  for (std::size_t i = 0; i < expected.bias.size(); ++i) expected.bias[i] -= lr * g.d_bias[i];

  OptimizerState state = OptimizerState::zeros_like(m);
  step(m, state, g, cfg, 5);
  EXPECT_EQ(m, expected);
}

TEST(StepTest, ZeroGradientZeroVelocityIsFixedPointWithoutDecay) {
  TransformModel m(2, 2);
  m.weight(0, 1) = 3.0;
  m.bias = {1.0, -1.0};
  const TransformModel before = m;
  OptimizerState state = OptimizerState::zeros_like(m);
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  step(m, state, zero_grads(m), cfg, 0);
  EXPECT_EQ(m, before);
}

TEST(StepTest, WeightDecayShrinksWeightsButNeverBias) {
  TransformModel m(2, 3);
  for (double& w : m.weight.values()) w = 2.0;
  m.bias = {5.0, -5.0};
  OptimizerState state = OptimizerState::zeros_like(m);
  const OptimizerConfig cfg;
  double prev = 2.0;
  for (int s = 0; s < 50; ++s) {
    step(m, state, zero_grads(m), cfg, 0);
    EXPECT_LT(m.weight(0, 0), prev);
    EXPECT_GT(m.weight(0, 0), 0.0);
    prev = m.weight(0, 0);
    EXPECT_EQ(m.bias, (std::vector<double>{5.0, -5.0}));
  }
}

TEST(StepTest, Deterministic) {
  TransformModel a(3, 3);
  a.weight(1, 2) = 0.5;
  TransformModel b = a;
  OptimizerState sa = OptimizerState::zeros_like(a), sb = OptimizerState::zeros_like(b);
  GradientSet g = zero_grads(a);
  g.d_weight(1, 1) = 0.25;
  g.d_bias[2] = -0.75;
  const OptimizerConfig cfg;
  for (int s = 0; s < 3; ++s) {
    step(a, sa, g, cfg, s);
    step(b, sb, g, cfg, s);
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa.velocity_weight, sb.velocity_weight);
}

TEST(StepTest, ShapeMismatchRejected) {
  TransformModel m(2, 2);
  OptimizerState state = OptimizerState::zeros_like(m);
  GradientSet g{Matrix(2, 3), std::vector<double>(2, 0.0)};
  EXPECT_THROW(step(m, state, g, OptimizerConfig{}, 0), Error);
}

TEST(OptimizerConfigTest, DefaultsAndValidation) {
  OptimizerConfig cfg;
  EXPECT_EQ(cfg.lr0, 0.01);
  EXPECT_EQ(cfg.momentum, 0.9);
  EXPECT_EQ(cfg.weight_decay, 1e-4);
  EXPECT_EQ(cfg.decay_factor, 10.0);
  EXPECT_EQ(cfg.decay_every_epochs, 4);
  EXPECT_EQ(cfg.epochs, 20);
  EXPECT_EQ(cfg.batch_size, 8);
  EXPECT_NO_THROW(cfg.validate());
  cfg.momentum = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace vgrounding
