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

#include "vgrounding/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vgrounding/error.hpp"
#include "vgrounding/model.hpp"
#include "vgrounding/seeding.hpp"

namespace vgrounding {
namespace {

struct Problem {
  TransformModel model;
  std::vector<double> text;
  Matrix proposals;
  std::size_t gt = 0;
};

Problem random_problem(std::mt19937_64& rng, const GradcheckConfig& cfg) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t p = pick(cfg.min_proposals, cfg.max_proposals);
  const std::size_t d_img = pick(cfg.min_dim, cfg.max_dim);
  const std::size_t d_txt = pick(cfg.min_dim, cfg.max_dim);

  Problem pr;
  pr.model = TransformModel(d_img, d_txt);
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(d_txt));
  for (double& w : pr.model.weight.values()) w = w_scale * normal(rng);
  for (double& b : pr.model.bias) b = 0.1 * normal(rng);
  pr.text.resize(d_txt);
  for (double& x : pr.text) x = normal(rng);
  pr.proposals = Matrix(p, d_img);
  for (double& a : pr.proposals.values()) a = normal(rng);
  pr.gt = pick(0, p - 1);
  return pr;
}

double loss_at(const Problem& pr, const TransformModel& model) {
  return loss(cosine_scores(model, pr.text, pr.proposals, pr.gt));
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckConfig& cfg) {
  if (cfg.trials == 0) fail(ErrorKind::kConfig, "gradcheck: trials must be >= 1");
  if (cfg.min_proposals < 1 || cfg.min_proposals > cfg.max_proposals ||
      cfg.min_dim < 1 || cfg.min_dim > cfg.max_dim) {
    fail(ErrorKind::kConfig, "gradcheck: invalid size ranges");
  }
  if (!(cfg.step > 0.0)) fail(ErrorKind::kConfig, "gradcheck: step must be positive");

  std::mt19937_64 rng = make_engine(cfg.seed, SeedStream::kGradcheck);
  GradcheckReport report;
  // diff <= max(rel_tol * magnitude, abs_floor)  <=>  diff / max(magnitude, abs_floor / rel_tol) <= rel_tol
  const double denom_floor = cfg.abs_floor / cfg.rel_tol;

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const Problem pr = random_problem(rng, cfg);
    const BackwardResult analytic = backward(pr.model, pr.text, pr.proposals, pr.gt);
    TransformModel probe = pr.model;

    auto check = [&](double& param, double grad) {
      const double saved = param;
      param = saved + cfg.step;
      const double up = loss_at(pr, probe);
      param = saved - cfg.step;
      const double down = loss_at(pr, probe);
      param = saved;
      const double numeric = (up - down) / (2.0 * cfg.step);

      const double abs_err = std::abs(grad - numeric);
      const double rel = abs_err / std::max({std::abs(grad), std::abs(numeric), denom_floor});
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      report.max_rel_error = std::max(report.max_rel_error, rel);
      ++report.coordinates;
      if (rel > cfg.rel_tol) ++report.failures;
    };

    auto w = probe.weight.values();
    auto gw = analytic.grads.d_weight.values();
    for (std::size_t i = 0; i < w.size(); ++i) check(w[i], gw[i]);
    for (std::size_t i = 0; i < probe.bias.size(); ++i) check(probe.bias[i], analytic.grads.d_bias[i]);
    ++report.trials;
  }
  return report;
}

}  // namespace vgrounding
