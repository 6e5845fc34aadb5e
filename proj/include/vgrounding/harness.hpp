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

#ifndef VGROUNDING_HARNESS_HPP_
#define VGROUNDING_HARNESS_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vgrounding/box.hpp"
#include "vgrounding/dataset.hpp"
#include "vgrounding/model.hpp"
#include "vgrounding/optimizer.hpp"

namespace vgrounding {

struct RunConfig {
  OptimizerConfig optimizer;
  std::size_t top_k = 32;
  double min_gt_iou = 0.5;
  bool strict_ap50 = true;
  std::filesystem::path train_dir;
  std::filesystem::path val_dir;
  std::filesystem::path test_dir;
  std::filesystem::path checkpoint_path;
  // Worker cap for evaluation; 0 means hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

struct SamplePrediction {
  std::string sample_id;
  BoundingBox predicted_box;
  std::size_t predicted_index = 0;  // index into the manifest's proposal list
  double max_score = 0.0;
  bool hit = false;
};

struct EvalReport {
  double ap50 = 0.0;
  double oracle_recall = 0.0;
  std::size_t n_samples = 0;
  std::vector<SamplePrediction> per_sample;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double mean_train_loss = 0.0;
  std::optional<double> val_ap50;
  std::size_t skipped_samples = 0;
};

struct TrainResult {
  TransformModel model;
  std::vector<EpochLog> epochs;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Indices of the k proposals with the highest rpn_score, in their original
/// relative order. Equal scores keep the earlier proposal.
std::vector<std::size_t> top_k_indices(const GroundingSample& sample,
                                       std::size_t k);

GroundingSample select_top_k(const GroundingSample& sample, std::size_t k);

/// Mini-batch training of the transform. Per epoch the training samples are
/// shuffled, batched, and each batch's gradients are averaged over the
/// samples that have a ground-truth-assignable proposal. Samples without one
/// are skipped and counted.
TrainResult train(const Dataset& train_set, const Dataset* val_set,
                  const RunConfig& cfg, const EpochCallback& on_epoch = {});

/// Loads cfg.train_dir / cfg.val_dir, trains, and writes cfg.checkpoint_path
/// when it is set.
TrainResult train(const RunConfig& cfg, const EpochCallback& on_epoch = {});

EvalReport evaluate(const TransformModel& model, const Dataset& dataset,
                    const RunConfig& cfg);
EvalReport evaluate(const TransformModel& model,
                    const std::filesystem::path& dataset_dir,
                    const RunConfig& cfg);

/// One JSON line per sample: {"sample_id","box":[4],"score"}.
void write_predictions(const EvalReport& report, std::ostream& out);
void predict(const TransformModel& model,
             const std::filesystem::path& dataset_dir, const RunConfig& cfg,
             const std::filesystem::path& out_path);

void write_epoch_log_csv(const std::vector<EpochLog>& epochs, std::ostream& out);

struct AblationRow {
  std::string label;
  double ap50 = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;

  void write_csv(std::ostream& out) const;
  void write_table(std::ostream& out) const;
};

/// Trains and evaluates (on cfg.val_dir) once per k, same seed each time.
AblationResult ablate_top_k(const RunConfig& cfg,
                            const std::vector<std::size_t>& ks);

struct EncoderDataset {
  std::string label;
  std::filesystem::path train_dir;
  std::filesystem::path eval_dir;
};

/// One train + evaluate per labelled dataset pair.
AblationResult ablate_encoders(const std::vector<EncoderDataset>& datasets,
                               const RunConfig& cfg);

}  // namespace vgrounding

#endif  // VGROUNDING_HARNESS_HPP_
