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

#include "vgrounding/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "json.hpp"
#include "vgrounding/error.hpp"
#include "vgrounding/parallel.hpp"
#include "vgrounding/seeding.hpp"

namespace vgrounding {
namespace {

// Cached training view of one sample: kept proposal features and the index of
// the assigned ground-truth proposal among them.
struct TrainItem {
  Matrix proposal_feats;
  std::optional<std::size_t> gt_index;
};

Matrix gather_rows(const Dataset& ds, const GroundingSample& sample,
                   const std::vector<std::size_t>& kept) {
  Matrix m(kept.size(), ds.meta.d_img);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto src = ds.features.image_feats.row(sample.proposals[kept[i]].feat_row);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

void check_dims(const TransformModel& model, const Dataset& ds, const char* what) {
  if (model.d_img() != ds.meta.d_img || model.d_txt() != ds.meta.d_txt) {
    fail(ErrorKind::kDimension,
         fmt::format("{}: model is d_img={} d_txt={}, dataset is d_img={} d_txt={}", what,
                     model.d_img(), model.d_txt(), ds.meta.d_img, ds.meta.d_txt));
  }
}

void accumulate(GradientSet& acc, const GradientSet& g) {
  auto a = acc.d_weight.values();
  auto b = g.d_weight.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  for (std::size_t i = 0; i < acc.d_bias.size(); ++i) acc.d_bias[i] += g.d_bias[i];
}

void scale(GradientSet& g, double factor) {
  for (double& v : g.d_weight.values()) v *= factor;
  for (double& v : g.d_bias) v *= factor;
}

}  // namespace

void RunConfig::validate() const {
  optimizer.validate();
  if (top_k < 1) fail(ErrorKind::kConfig, "top_k must be >= 1");
  if (!(min_gt_iou >= 0.0 && min_gt_iou <= 1.0)) fail(ErrorKind::kConfig, "min_gt_iou must lie in [0, 1]");
}

std::vector<std::size_t> top_k_indices(const GroundingSample& sample,
                                       std::size_t k) {
  std::vector<std::size_t> idx(sample.proposals.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k >= idx.size()) return idx;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return sample.proposals[a].rpn_score > sample.proposals[b].rpn_score;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

GroundingSample select_top_k(const GroundingSample& sample, std::size_t k) {
  if (k >= sample.proposals.size()) return sample;
  GroundingSample out = sample;
  out.proposals.clear();
  for (std::size_t i : top_k_indices(sample, k)) out.proposals.push_back(sample.proposals[i]);
  return out;
}

TrainResult train(const Dataset& train_set, const Dataset* val_set,
                  const RunConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  const OptimizerConfig& opt = cfg.optimizer;

  TrainResult result;
  result.model = TransformModel::initialize(train_set.meta.d_img, train_set.meta.d_txt, opt.seed);
  if (val_set) check_dims(result.model, *val_set, "validation set");

  std::vector<TrainItem> items(train_set.samples.size());
  std::size_t trainable = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const GroundingSample& s = train_set.samples[i];
    const auto kept = top_k_indices(s, cfg.top_k);
    items[i].gt_index = assign_gt_proposal(select_top_k(s, cfg.top_k), cfg.min_gt_iou);
    if (items[i].gt_index) {
      items[i].proposal_feats = gather_rows(train_set, s, kept);
      ++trainable;
    }
  }
  if (trainable == 0) {
    fail(ErrorKind::kDataset, fmt::format(
        "no trainable samples: none of {} training samples has a proposal with IoU >= {} "
        "against its ground-truth box", items.size(), cfg.min_gt_iou));
  }
  const std::size_t skipped = items.size() - trainable;

  OptimizerState state = OptimizerState::zeros_like(result.model);
  std::mt19937_64 shuffle_rng = make_engine(opt.seed, SeedStream::kShuffle);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(opt.batch_size);

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;

    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      GradientSet acc{Matrix(result.model.d_img(), result.model.d_txt()),
                      std::vector<double>(result.model.d_img(), 0.0)};
      std::size_t used = 0;
      for (std::size_t j = start; j < end; ++j) {
        const TrainItem& item = items[order[j]];
        if (!item.gt_index) continue;
        const GroundingSample& s = train_set.samples[order[j]];
        BackwardResult br = backward(result.model, train_set.text_feature(s),
                                     item.proposal_feats, *item.gt_index);
        loss_sum += br.loss;
        accumulate(acc, br.grads);
        ++used;
      }
      if (used == 0) continue;
      scale(acc, 1.0 / static_cast<double>(used));
      step(result.model, state, acc, opt, epoch);
    }
    if (!result.model.all_finite()) {
      fail(ErrorKind::kNumeric, fmt::format("non-finite parameters after epoch {}", epoch));
    }

    EpochLog log;
    log.epoch = epoch;
    log.lr = learning_rate(opt, epoch);
    log.mean_train_loss = loss_sum / static_cast<double>(trainable);
    log.skipped_samples = skipped;
    if (val_set) log.val_ap50 = evaluate(result.model, *val_set, cfg).ap50;
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

TrainResult train(const RunConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  const Dataset train_set = load_dataset(cfg.train_dir);
  std::optional<Dataset> val_set;
  if (!cfg.val_dir.empty()) val_set = load_dataset(cfg.val_dir);
  TrainResult result = train(train_set, val_set ? &*val_set : nullptr, cfg, on_epoch);
  if (!cfg.checkpoint_path.empty()) save_checkpoint(result.model, cfg.checkpoint_path);
  return result;
}

EvalReport evaluate(const TransformModel& model, const Dataset& dataset,
                    const RunConfig& cfg) {
  check_dims(model, dataset, "evaluate");
  if (dataset.samples.empty()) fail(ErrorKind::kDataset, "evaluate: empty dataset");
  if (cfg.top_k < 1) fail(ErrorKind::kConfig, "top_k must be >= 1");

  EvalReport report;
  report.n_samples = dataset.samples.size();
  report.per_sample.resize(report.n_samples);
  std::vector<char> reachable(report.n_samples, 0);

  parallel_for(report.n_samples, cfg.threads, [&](std::size_t i) {
    const GroundingSample& s = dataset.samples[i];
    const auto kept = top_k_indices(s, cfg.top_k);
    const ScoreVector sv =
        cosine_scores(model, dataset.text_feature(s), gather_rows(dataset, s, kept));
    const std::size_t best = sv.argmax();

    SamplePrediction& pred = report.per_sample[i];
    pred.sample_id = s.sample_id;
    pred.predicted_index = kept[best];
    pred.predicted_box = s.proposals[kept[best]].box;
    pred.max_score = sv.scores[best];
    pred.hit = hit_at_50(pred.predicted_box, s.gt_box, cfg.strict_ap50);
    reachable[i] = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return hit_at_50(s.proposals[k].box, s.gt_box, cfg.strict_ap50);
    });
  });

  std::size_t hits = 0;
  std::size_t reach = 0;
  for (std::size_t i = 0; i < report.n_samples; ++i) {
    hits += report.per_sample[i].hit ? 1 : 0;
    reach += reachable[i] ? 1 : 0;
  }
  const auto n = static_cast<double>(report.n_samples);
  report.ap50 = static_cast<double>(hits) / n;
  report.oracle_recall = static_cast<double>(reach) / n;
  return report;
}

EvalReport evaluate(const TransformModel& model,
                    const std::filesystem::path& dataset_dir,
                    const RunConfig& cfg) {
  return evaluate(model, load_dataset(dataset_dir), cfg);
}

void write_predictions(const EvalReport& report, std::ostream& out) {
  for (const SamplePrediction& p : report.per_sample) {
    const auto b = p.predicted_box;
    const nlohmann::json j = {{"sample_id", p.sample_id},
                              {"box", {b.x_min, b.y_min, b.x_max, b.y_max}},
                              {"score", p.max_score}};
    out << j.dump() << '\n';
  }
}

void predict(const TransformModel& model,
             const std::filesystem::path& dataset_dir, const RunConfig& cfg,
             const std::filesystem::path& out_path) {
  const EvalReport report = evaluate(model, dataset_dir, cfg);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, fmt::format("{}: cannot open for writing", out_path.string()));
  write_predictions(report, out);
  if (!out) fail(ErrorKind::kIo, fmt::format("{}: write failed", out_path.string()));
}

void write_epoch_log_csv(const std::vector<EpochLog>& epochs, std::ostream& out) {
  out << "epoch,lr,mean_train_loss,val_ap50,skipped_samples\n";
  for (const EpochLog& e : epochs) {
    out << fmt::format("{},{},{},{},{}\n", e.epoch, e.lr, e.mean_train_loss,
                       e.val_ap50 ? fmt::format("{}", *e.val_ap50) : std::string(),
                       e.skipped_samples);
  }
}

}  // namespace vgrounding
