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

#include <algorithm>

#include <fmt/format.h>

#include "vgrounding/error.hpp"
#include "vgrounding/harness.hpp"

namespace vgrounding {

void AblationResult::write_csv(std::ostream& out) const {
  out << "label,ap50\n";
  for (const AblationRow& r : rows) out << fmt::format("{},{}\n", r.label, r.ap50);
}

void AblationResult::write_table(std::ostream& out) const {
  std::size_t width = 5;  // "label"
  for (const AblationRow& r : rows) width = std::max(width, r.label.size());
  out << fmt::format("{:<{}}  {:>6}\n", "label", width, "AP50");
  out << std::string(width + 8, '-') << '\n';
  for (const AblationRow& r : rows) {
    out << fmt::format("{:<{}}  {:>6.1f}\n", r.label, width, 100.0 * r.ap50);
  }
}

AblationResult ablate_top_k(const RunConfig& cfg,
                            const std::vector<std::size_t>& ks) {
  if (ks.empty()) fail(ErrorKind::kConfig, "ablate_top_k: empty list of k values");
  if (cfg.val_dir.empty()) fail(ErrorKind::kConfig, "ablate_top_k: an evaluation directory is required");
  const Dataset train_set = load_dataset(cfg.train_dir);
  const Dataset eval_set = load_dataset(cfg.val_dir);

  AblationResult result;
  for (std::size_t k : ks) {
    RunConfig run = cfg;
    run.top_k = k;
    const TrainResult trained = train(train_set, nullptr, run);
    result.rows.push_back({fmt::format("top_k={}", k), evaluate(trained.model, eval_set, run).ap50});
  }
  return result;
}

AblationResult ablate_encoders(const std::vector<EncoderDataset>& datasets,
                               const RunConfig& cfg) {
  if (datasets.empty()) fail(ErrorKind::kConfig, "ablate_encoders: no datasets given");
  AblationResult result;
  for (const EncoderDataset& entry : datasets) {
    const Dataset train_set = load_dataset(entry.train_dir);
    const Dataset eval_set = load_dataset(entry.eval_dir);
    const TrainResult trained = train(train_set, nullptr, cfg);
    result.rows.push_back({entry.label, evaluate(trained.model, eval_set, cfg).ap50});
  }
  return result;
}

}  // namespace vgrounding
