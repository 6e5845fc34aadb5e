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

#ifndef VGROUNDING_SYNTHETIC_HPP_
#define VGROUNDING_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>

#include "vgrounding/matrix.hpp"

namespace vgrounding {

/// Parameters of the planted cross-modal generator.
///
/// A fixed map A (d_img x d_txt, standard normal entries) links the two
/// modalities. Each sample draws a latent z on the unit sphere of R^d_txt:
///   text feature      = z + eps
///   target proposal   = Az / |Az| + eps'
///   random distractor = Az' / |Az'|            (z' independent of z)
/// with eps, eps' ~ N(0, noise_sigma^2 I). Every proposal occupies its own
/// cell of a fixed grid, so boxes are pairwise disjoint and the target's box
/// equals the ground-truth box.
///
/// `confusers` optionally turns that many distractors into clutter: their
/// latent is normalize(z + confuser_spread * n) with n standard normal, and
/// their rpn_score is drawn from [0, 0.5) while the target's is drawn from
/// [0.5, 1). With confusers == 0 all rpn scores are uniform in [0, 1).
struct SyntheticConfig {
  std::size_t n_train = 2000;
  std::size_t n_test = 500;
  std::size_t proposals = 16;
  std::size_t d_img = 64;
  std::size_t d_txt = 32;
  double noise_sigma = 0.05;
  std::uint64_t seed = 42;
  std::size_t confusers = 0;
  double confuser_spread = 0.5;
};

struct SyntheticResult {
  std::filesystem::path train_dir;
  std::filesystem::path test_dir;
  Matrix planted_map;  // A, d_img x d_txt
};

/// Writes `<out>/train` and `<out>/test`. Output is a pure function of `cfg`.
SyntheticResult generate_synthetic(const SyntheticConfig& cfg,
                                   const std::filesystem::path& out);

}  // namespace vgrounding

#endif  // VGROUNDING_SYNTHETIC_HPP_
