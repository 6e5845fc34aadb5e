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

#ifndef VGROUNDING_OPTIMIZER_HPP_
#define VGROUNDING_OPTIMIZER_HPP_

#include <cstdint>
#include <vector>

#include "vgrounding/matrix.hpp"
#include "vgrounding/model.hpp"

namespace vgrounding {

struct OptimizerConfig {
  double lr0 = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double decay_factor = 10.0;
  int decay_every_epochs = 4;
  int epochs = 20;
  int batch_size = 8;
  std::uint64_t seed = 0;

  /// Throws Error(kConfig) on out-of-range values.
  void validate() const;
};

struct OptimizerState {
  Matrix velocity_weight;
  std::vector<double> velocity_bias;
  std::uint64_t step_count = 0;
  int epoch = 0;

  static OptimizerState zeros_like(const TransformModel& model);
};

/// Step schedule: lr0 / decay_factor^floor(epoch / decay_every_epochs).
/// `epoch` is 0-based.
double learning_rate(const OptimizerConfig& cfg, int epoch);

/// One SGD step with Nesterov momentum. Weight decay is added to the weight
/// gradient only; the bias is never decayed.
///
///   g' = g + weight_decay * theta   (weights only)
///   v  = momentum * v + g'
///   theta -= lr * (g' + momentum * v)
void step(TransformModel& model, OptimizerState& state,
          const GradientSet& grads, const OptimizerConfig& cfg, int epoch);

}  // namespace vgrounding

#endif  // VGROUNDING_OPTIMIZER_HPP_
