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

#include <cmath>

#include <fmt/format.h>

#include "vgrounding/error.hpp"

namespace vgrounding {
namespace {

// v = mu * v + g';  theta -= lr * (g' + mu * v)
inline void nesterov_update(double& theta, double& velocity, double grad,
                            double lr, double mu) {
  velocity = mu * velocity + grad;
  theta -= lr * (grad + mu * velocity);
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) fail(ErrorKind::kConfig, "lr must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::kConfig, "momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) fail(ErrorKind::kConfig, "weight decay must be non-negative");
  if (!(decay_factor > 0.0)) fail(ErrorKind::kConfig, "lr decay factor must be positive");
  if (decay_every_epochs < 1) fail(ErrorKind::kConfig, "lr decay period must be >= 1 epoch");
  if (epochs < 1) fail(ErrorKind::kConfig, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorKind::kConfig, "batch size must be >= 1");
}

OptimizerState OptimizerState::zeros_like(const TransformModel& model) {
  OptimizerState s;
  s.velocity_weight = Matrix(model.d_img(), model.d_txt());
  s.velocity_bias.assign(model.d_img(), 0.0);
  return s;
}

double learning_rate(const OptimizerConfig& cfg, int epoch) {
  if (epoch < 0) fail(ErrorKind::kConfig, "epoch must be >= 0");
  const int plateau = epoch / cfg.decay_every_epochs;
  return cfg.lr0 / std::pow(cfg.decay_factor, plateau);
}

void step(TransformModel& model, OptimizerState& state,
          const GradientSet& grads, const OptimizerConfig& cfg, int epoch) {
  const bool shapes_ok =
      grads.d_weight.rows() == model.d_img() && grads.d_weight.cols() == model.d_txt() &&
      grads.d_bias.size() == model.d_img() &&
      state.velocity_weight.rows() == model.d_img() &&
      state.velocity_weight.cols() == model.d_txt() &&
      state.velocity_bias.size() == model.d_img();
  if (!shapes_ok) fail(ErrorKind::kDimension, "optimizer step: shape mismatch");

  const double lr = learning_rate(cfg, epoch);
  const double mu = cfg.momentum;

  auto w = model.weight.values();
  auto vw = state.velocity_weight.values();
  auto gw = grads.d_weight.values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    nesterov_update(w[i], vw[i], gw[i] + cfg.weight_decay * w[i], lr, mu);
  }
  for (std::size_t i = 0; i < model.bias.size(); ++i) {
    nesterov_update(model.bias[i], state.velocity_bias[i], grads.d_bias[i], lr, mu);
  }
  ++state.step_count;
  state.epoch = epoch;
}

}  // namespace vgrounding
