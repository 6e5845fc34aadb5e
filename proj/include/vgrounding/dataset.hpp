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

// On-disk layout of a grounding dataset directory:
//
//   meta.json        {"schema_version":1,"d_img":..,"d_txt":..,"num_samples":..,
//                     "num_proposal_rows":..,"dtype":"f32","endianness":"little"}
//   manifest.jsonl   one sample per line:
//                    {"sample_id","command","text_row","gt_box":[4],
//                     "proposals":[{"box":[4],"rpn_score","feat_row"}, ...]}
//   image_feats.bin  num_proposal_rows x d_img float32 LE, row-major, no header
//   text_feats.bin   num_samples x d_txt float32 LE, row-major, no header

#ifndef VGROUNDING_DATASET_HPP_
#define VGROUNDING_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vgrounding/box.hpp"
#include "vgrounding/matrix.hpp"

namespace vgrounding {

inline constexpr std::int64_t kSchemaVersion = 1;

struct DatasetMeta {
  std::int64_t schema_version = kSchemaVersion;
  std::size_t d_img = 0;
  std::size_t d_txt = 0;
  std::size_t num_samples = 0;
  std::size_t num_proposal_rows = 0;
  std::string dtype = "f32";
  std::string endianness = "little";

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Proposal {
  BoundingBox box;
  double rpn_score = 0.0;
  std::size_t feat_row = 0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct GroundingSample {
  std::string sample_id;
  std::string command;
  std::size_t text_row = 0;
  BoundingBox gt_box;
  std::vector<Proposal> proposals;

  friend bool operator==(const GroundingSample&, const GroundingSample&) = default;
};

/// Proposal and sentence features, promoted to double on load.
struct FeatureStore {
  Matrix image_feats;  // num_proposal_rows x d_img
  Matrix text_feats;   // num_samples x d_txt
};

/// A loaded dataset. Immutable after load; safe for concurrent reads.
struct Dataset {
  DatasetMeta meta;
  std::vector<GroundingSample> samples;
  FeatureStore features;

  std::span<const double> text_feature(const GroundingSample& s) const {
    return features.text_feats.row(s.text_row);
  }
};

/// Copies the proposal feature rows of `sample` into a P x d_img matrix in
/// proposal order.
Matrix gather_proposal_features(const Dataset& dataset,
                                const GroundingSample& sample);

/// Loads and validates a dataset directory. Every failure raises
/// Error(kDataset) naming the offending file and line or row.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes a dataset directory in the layout above. Features are narrowed to
/// float32. The directory is created if needed; existing files are replaced.
void write_dataset(const std::filesystem::path& dir, const DatasetMeta& meta,
                   std::span<const GroundingSample> samples,
                   std::span<const float> image_feats,
                   std::span<const float> text_feats);

}  // namespace vgrounding

#endif  // VGROUNDING_DATASET_HPP_
