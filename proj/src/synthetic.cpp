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

#include "vgrounding/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "vgrounding/dataset.hpp"
#include "vgrounding/error.hpp"
#include "vgrounding/seeding.hpp"

namespace vgrounding {
namespace {

// Side of one grid cell in pixels; every proposal box lies strictly inside its
// own cell.
constexpr int kCellSize = 64;
constexpr int kMaxInset = 16;

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(make_engine(seed, SeedStream::kSynthetic)) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  std::mt19937_64& engine() { return rng_; }

  std::vector<double> unit_sphere(std::size_t d) {
    std::vector<double> v(d);
    double sq = 0.0;
    do {
      sq = 0.0;
      for (double& x : v) {
        x = normal();
        sq += x * x;
      }
    } while (sq == 0.0);
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

void normalize_in_place(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  if (n == 0.0) fail(ErrorKind::kNumeric, "synthetic: zero-norm latent image");
  for (double& x : v) x /= n;
}

std::vector<double> project(const Matrix& a, std::span<const double> z) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) acc += a(r, c) * z[c];
    out[r] = acc;
  }
  return out;
}

void validate(const SyntheticConfig& cfg) {
  if (cfg.proposals < 2) fail(ErrorKind::kConfig, "synthetic: proposals per sample must be >= 2");
  if (cfg.d_img < 2 || cfg.d_txt < 2) fail(ErrorKind::kConfig, "synthetic: dims must be >= 2");
  if (cfg.n_train < 1 || cfg.n_test < 1) fail(ErrorKind::kConfig, "synthetic: n_train and n_test must be >= 1");
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    fail(ErrorKind::kConfig, "synthetic: noise_sigma must be a finite non-negative number");
  }
  if (cfg.confusers >= cfg.proposals) {
    fail(ErrorKind::kConfig, "synthetic: confusers must be < proposals per sample");
  }
  if (!(cfg.confuser_spread >= 0.0)) fail(ErrorKind::kConfig, "synthetic: confuser_spread must be >= 0");
}

enum class Role { kTarget, kConfuser, kDistractor };

void generate_split(Generator& gen, const SyntheticConfig& cfg, const Matrix& a,
                    std::size_t n, const char* split,
                    const std::filesystem::path& dir) {
  const std::size_t p = cfg.proposals;
  const auto grid_cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
  const std::size_t grid_rows = (p + grid_cols - 1) / grid_cols;
  const std::size_t cells = grid_cols * grid_rows;

  std::vector<GroundingSample> samples;
  samples.reserve(n);
  std::vector<float> image_feats;
  image_feats.reserve(n * p * cfg.d_img);
  std::vector<float> text_feats;
  text_feats.reserve(n * cfg.d_txt);

  std::vector<std::size_t> cell_order(cells);
  std::vector<Role> roles(p);

  for (std::size_t s = 0; s < n; ++s) {
    const std::vector<double> z = gen.unit_sphere(cfg.d_txt);
    for (double v : z) text_feats.push_back(static_cast<float>(v + cfg.noise_sigma * gen.normal()));

    const auto target = static_cast<std::size_t>(gen.uniform_int(0, static_cast<int>(p) - 1));
    std::fill(roles.begin(), roles.end(), Role::kDistractor);
    roles[target] = Role::kTarget;
    if (cfg.confusers > 0) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < p; ++i) {
        if (i != target) others.push_back(i);
      }
      std::shuffle(others.begin(), others.end(), gen.engine());
      for (std::size_t i = 0; i < cfg.confusers; ++i) roles[others[i]] = Role::kConfuser;
    }

    std::iota(cell_order.begin(), cell_order.end(), std::size_t{0});
    std::shuffle(cell_order.begin(), cell_order.end(), gen.engine());

    GroundingSample sample;
    sample.sample_id = fmt::format("{}-{:06d}", split, s);
    sample.text_row = s;
    for (std::size_t i = 0; i < p; ++i) {
      std::vector<double> feat;
      double score = 0.0;
      switch (roles[i]) {
        case Role::kTarget:
          feat = project(a, z);
          normalize_in_place(feat);
          for (double& v : feat) v += cfg.noise_sigma * gen.normal();
          score = cfg.confusers > 0 ? gen.uniform(0.5, 1.0) : gen.uniform(0.0, 1.0);
          break;
        case Role::kConfuser: {
          std::vector<double> zc = z;
          for (double& v : zc) v += cfg.confuser_spread * gen.normal();
          normalize_in_place(zc);
          feat = project(a, zc);
          normalize_in_place(feat);
          score = gen.uniform(0.0, 0.5);
          break;
        }
        case Role::kDistractor:
          feat = project(a, gen.unit_sphere(cfg.d_txt));
          normalize_in_place(feat);
          score = gen.uniform(0.0, 1.0);
          break;
      }
      for (double v : feat) image_feats.push_back(static_cast<float>(v));

      const std::size_t cell = cell_order[i];
      const double x0 = static_cast<double>((cell % grid_cols) * kCellSize);
      const double y0 = static_cast<double>((cell / grid_cols) * kCellSize);
      BoundingBox box{x0 + gen.uniform_int(1, kMaxInset), y0 + gen.uniform_int(1, kMaxInset),
                      x0 + kCellSize - gen.uniform_int(1, kMaxInset),
                      y0 + kCellSize - gen.uniform_int(1, kMaxInset)};
      sample.proposals.push_back({box, score, s * p + i});
      if (roles[i] == Role::kTarget) sample.gt_box = box;
    }
    samples.push_back(std::move(sample));
  }

  DatasetMeta meta;
  meta.d_img = cfg.d_img;
  meta.d_txt = cfg.d_txt;
  meta.num_samples = n;
  meta.num_proposal_rows = n * p;
  write_dataset(dir, meta, samples, image_feats, text_feats);
}

}  // namespace

SyntheticResult generate_synthetic(const SyntheticConfig& cfg,
                                   const std::filesystem::path& out) {
  validate(cfg);
  Generator gen(cfg.seed);

  SyntheticResult result;
  result.planted_map = Matrix(cfg.d_img, cfg.d_txt);
  for (double& v : result.planted_map.values()) v = gen.normal();

  result.train_dir = out / "train";
  result.test_dir = out / "test";
  generate_split(gen, cfg, result.planted_map, cfg.n_train, "train", result.train_dir);
  generate_split(gen, cfg, result.planted_map, cfg.n_test, "test", result.test_dir);
  return result;
}

}  // namespace vgrounding
