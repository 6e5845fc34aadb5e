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

// Grounding model: a single affine map T(x) = W x + b from sentence-embedding
// space into proposal-feature space. Each proposal is scored by the cosine
// between its feature and T(x); the scores feed a softmax cross-entropy whose
// target is the ground-truth proposal.

#ifndef VGROUNDING_MODEL_HPP_
#define VGROUNDING_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "vgrounding/matrix.hpp"

namespace vgrounding {

/// Lower clamp applied to proposal-feature norms while scoring.
inline constexpr double kProposalNormFloor = 1e-12;

struct TransformModel {
  Matrix weight;             // d_img x d_txt
  std::vector<double> bias;  // d_img

  TransformModel() = default;
  TransformModel(std::size_t d_img, std::size_t d_txt)
      : weight(d_img, d_txt), bias(d_img, 0.0) {}

  std::size_t d_img() const { return weight.rows(); }
  std::size_t d_txt() const { return weight.cols(); }

  /// W ~ U(-1/sqrt(d_txt), 1/sqrt(d_txt)), b = 0.
  static TransformModel initialize(std::size_t d_img, std::size_t d_txt,
                                   std::uint64_t seed);

  bool all_finite() const;

  friend bool operator==(const TransformModel&, const TransformModel&) = default;
};

struct ScoreVector {
  std::vector<double> scores;  // cosine per proposal, in [-1, 1]
  std::vector<double> probs;   // softmax(scores)
  std::optional<std::size_t> gt_index;

  /// Lowest index among the maximal scores.
  std::size_t argmax() const;
};

struct GradientSet {
  Matrix d_weight;             // d_img x d_txt
  std::vector<double> d_bias;  // d_img
};

/// W x + b.
std::vector<double> transform(const TransformModel& model,
                              std::span<const double> text_feat);

/// Cosine scores of every row of `proposal_feats` (P x d_img) against the
/// transformed text vector, plus their softmax. Throws Error(kNumeric) if the
/// transformed vector has zero norm.
ScoreVector cosine_scores(const TransformModel& model,
                          std::span<const double> text_feat,
                          const Matrix& proposal_feats,
                          std::optional<std::size_t> gt_index = std::nullopt);

/// -log softmax(scores)[gt_index], evaluated as log-sum-exp minus the target
/// score with max subtraction.
double loss(const ScoreVector& score_vec);

struct BackwardResult {
  double loss = 0.0;
  GradientSet grads;
  ScoreVector scores;
};

/// Loss and closed-form gradients with respect to W and b.
BackwardResult backward(const TransformModel& model,
                        std::span<const double> text_feat,
                        const Matrix& proposal_feats, std::size_t gt_index);

// Checkpoint layout: "CMSVGCK1", u32 LE d_img, u32 LE d_txt,
// W row-major f64 LE, b f64 LE. No padding.
void save_checkpoint(const TransformModel& model,
                     const std::filesystem::path& path);

struct ExpectedDims {
  std::size_t d_img;
  std::size_t d_txt;
};

TransformModel load_checkpoint(const std::filesystem::path& path,
                               std::optional<ExpectedDims> expected = std::nullopt);

}  // namespace vgrounding

#endif  // VGROUNDING_MODEL_HPP_
