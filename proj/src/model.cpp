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

#include "vgrounding/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "vgrounding/error.hpp"
#include "vgrounding/seeding.hpp"

namespace vgrounding {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double max_of(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end());
}

}  // namespace

TransformModel TransformModel::initialize(std::size_t d_img, std::size_t d_txt,
                                          std::uint64_t seed) {
  if (d_img == 0 || d_txt == 0) fail(ErrorKind::kConfig, "model dims must be >= 1");
  TransformModel model(d_img, d_txt);
  std::mt19937_64 rng = make_engine(seed, SeedStream::kInit);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_txt));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : model.weight.values()) w = dist(rng);
  return model;
}

bool TransformModel::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(weight.values().begin(), weight.values().end(), finite) &&
         std::all_of(bias.begin(), bias.end(), finite);
}

std::size_t ScoreVector::argmax() const {
  // max_element returns the first maximal element.
  return static_cast<std::size_t>(
      std::distance(scores.begin(), std::max_element(scores.begin(), scores.end())));
}

std::vector<double> transform(const TransformModel& model,
                              std::span<const double> text_feat) {
  if (text_feat.size() != model.d_txt()) {
    fail(ErrorKind::kDimension, fmt::format("text feature has {} dims, model expects d_txt={}",
                                            text_feat.size(), model.d_txt()));
  }
  std::vector<double> out(model.d_img());
  for (std::size_t r = 0; r < model.d_img(); ++r) {
    out[r] = dot(model.weight.row(r), text_feat) + model.bias[r];
  }
  return out;
}

ScoreVector cosine_scores(const TransformModel& model,
                          std::span<const double> text_feat,
                          const Matrix& proposal_feats,
                          std::optional<std::size_t> gt_index) {
  if (proposal_feats.cols() != model.d_img()) {
    fail(ErrorKind::kDimension, fmt::format("proposal features have {} dims, model expects d_img={}",
                                            proposal_feats.cols(), model.d_img()));
  }
  if (proposal_feats.rows() == 0) fail(ErrorKind::kConfig, "no proposals to score");
  if (gt_index && *gt_index >= proposal_feats.rows()) {
    fail(ErrorKind::kConfig, fmt::format("gt_index {} out of range for {} proposals",
                                         *gt_index, proposal_feats.rows()));
  }

  const std::vector<double> t = transform(model, text_feat);
  const double t_norm = std::sqrt(dot(t, t));
  if (!(t_norm > 0.0) || !std::isfinite(t_norm)) {
    fail(ErrorKind::kNumeric, "degenerate model: transformed text vector has zero or non-finite norm");
  }

  ScoreVector sv;
  sv.gt_index = gt_index;
  const std::size_t p = proposal_feats.rows();
  sv.scores.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto a = proposal_feats.row(i);
    const double a_norm = std::max(std::sqrt(dot(a, a)), kProposalNormFloor);
    sv.scores[i] = std::clamp(dot(a, t) / (a_norm * t_norm), -1.0, 1.0);
  }

  const double m = max_of(sv.scores);
  sv.probs.resize(p);
  double sum = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    sv.probs[i] = std::exp(sv.scores[i] - m);
    sum += sv.probs[i];
  }
  for (double& q : sv.probs) q /= sum;
  return sv;
}

double loss(const ScoreVector& score_vec) {
  if (!score_vec.gt_index) fail(ErrorKind::kConfig, "loss requires a ground-truth index");
  const std::size_t g = *score_vec.gt_index;
  if (g >= score_vec.scores.size()) fail(ErrorKind::kConfig, "gt_index out of range");
  const double m = max_of(score_vec.scores);
  double sum = 0.0;
  for (double s : score_vec.scores) sum += std::exp(s - m);
  return std::max(0.0, std::log(sum) - (score_vec.scores[g] - m));
}

BackwardResult backward(const TransformModel& model,
                        std::span<const double> text_feat,
                        const Matrix& proposal_feats, std::size_t gt_index) {
  BackwardResult out;
  out.scores = cosine_scores(model, text_feat, proposal_feats, gt_index);
  out.loss = loss(out.scores);

  const std::vector<double> t = transform(model, text_feat);
  const double t_sq = dot(t, t);
  const double t_norm = std::sqrt(t_sq);
  const std::size_t d_img = model.d_img();
  const std::size_t p = proposal_feats.rows();

  // dL/dS_i = probs_i - [i == g]
  // dS_i/dt = a_i / (|a_i| |t|) - S_i t / |t|^2
  std::vector<double> d_t(d_img, 0.0);
  double radial = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double d_s = out.scores.probs[i] - (i == gt_index ? 1.0 : 0.0);
    if (d_s == 0.0) continue;
    const auto a = proposal_feats.row(i);
    const double a_norm = std::max(std::sqrt(dot(a, a)), kProposalNormFloor);
    const double coef = d_s / (a_norm * t_norm);
    for (std::size_t k = 0; k < d_img; ++k) d_t[k] += coef * a[k];
    radial += d_s * out.scores.scores[i];
  }
  for (std::size_t k = 0; k < d_img; ++k) d_t[k] -= radial * t[k] / t_sq;

  out.grads.d_weight = Matrix(d_img, model.d_txt());
  for (std::size_t r = 0; r < d_img; ++r) {
    auto row = out.grads.d_weight.row(r);
    for (std::size_t c = 0; c < model.d_txt(); ++c) row[c] = d_t[r] * text_feat[c];
  }
  out.grads.d_bias = std::move(d_t);
  return out;
}

}  // namespace vgrounding
