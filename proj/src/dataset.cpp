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

#include "vgrounding/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "vgrounding/error.hpp"

namespace vgrounding {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kManifestFile = "manifest.jsonl";
constexpr const char* kImageFeatsFile = "image_feats.bin";
constexpr const char* kTextFeatsFile = "text_feats.bin";

[[noreturn]] void dataset_error(const fs::path& file, const std::string& msg) {
  fail(ErrorKind::kDataset, fmt::format("{}: {}", file.string(), msg));
}

[[noreturn]] void dataset_error(const fs::path& file, std::size_t line,
                                const std::string& msg) {
  fail(ErrorKind::kDataset,
       fmt::format("{}:{}: {}", file.string(), line, msg));
}

std::size_t read_count(const json& obj, const char* key, const fs::path& file) {
  if (!obj.contains(key)) dataset_error(file, fmt::format("missing field '{}'", key));
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    dataset_error(file, fmt::format("field '{}' must be a non-negative integer", key));
  }
  return v.get<std::size_t>();
}

DatasetMeta parse_meta(const fs::path& file) {
  std::ifstream in(file);
  if (!in) dataset_error(file, "missing file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    dataset_error(file, fmt::format("malformed JSON: {}", e.what()));
  }
  if (!j.is_object()) dataset_error(file, "expected a JSON object");

  static const std::set<std::string> kFields = {
      "schema_version", "d_img", "d_txt", "num_samples",
      "num_proposal_rows", "dtype", "endianness"};
  for (const auto& [key, _] : j.items()) {
    if (!kFields.contains(key)) dataset_error(file, fmt::format("unknown field '{}'", key));
  }

  DatasetMeta meta;
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    dataset_error(file, "missing integer field 'schema_version'");
  }
  meta.schema_version = j["schema_version"].get<std::int64_t>();
  if (meta.schema_version != kSchemaVersion) {
    dataset_error(file, fmt::format("unsupported schema_version {}", meta.schema_version));
  }
  meta.d_img = read_count(j, "d_img", file);
  meta.d_txt = read_count(j, "d_txt", file);
  meta.num_samples = read_count(j, "num_samples", file);
  meta.num_proposal_rows = read_count(j, "num_proposal_rows", file);
  if (meta.d_img < 1 || meta.d_txt < 1) dataset_error(file, "d_img and d_txt must be >= 1");
  if (!j.contains("dtype") || j["dtype"] != "f32") dataset_error(file, "dtype must be \"f32\"");
  if (!j.contains("endianness") || j["endianness"] != "little") {
    dataset_error(file, "endianness must be \"little\"");
  }
  return meta;
}

BoundingBox parse_box(const json& v, const fs::path& file, std::size_t line,
                      const char* what) {
  if (!v.is_array() || v.size() != 4) {
    dataset_error(file, line, fmt::format("{} must be a 4-element array", what));
  }
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) dataset_error(file, line, fmt::format("{} has a non-numeric entry", what));
    c[i] = v[i].get<double>();
  }
  BoundingBox box = BoundingBox::from_array(c);
  if (!box.well_formed()) {
    dataset_error(file, line, fmt::format("{} {} has non-positive area", what, box.to_string()));
  }
  return box;
}

std::size_t parse_index(const json& obj, const char* key, const fs::path& file,
                        std::size_t line) {
  if (!obj.contains(key)) dataset_error(file, line, fmt::format("missing field '{}'", key));
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    dataset_error(file, line, fmt::format("'{}' must be a non-negative integer", key));
  }
  return v.get<std::size_t>();
}

GroundingSample parse_sample(const std::string& text, const fs::path& file,
                             std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    dataset_error(file, line, fmt::format("malformed JSON: {}", e.what()));
  }
  if (!j.is_object()) dataset_error(file, line, "expected a JSON object");

  GroundingSample s;
  if (!j.contains("sample_id") || !j["sample_id"].is_string()) {
    dataset_error(file, line, "missing string field 'sample_id'");
  }
  s.sample_id = j["sample_id"].get<std::string>();
  if (j.contains("command")) {
    if (!j["command"].is_string()) dataset_error(file, line, "'command' must be a string");
    s.command = j["command"].get<std::string>();
  }
  s.text_row = parse_index(j, "text_row", file, line);
  if (!j.contains("gt_box")) dataset_error(file, line, "missing field 'gt_box'");
  s.gt_box = parse_box(j["gt_box"], file, line, "gt_box");

  if (!j.contains("proposals") || !j["proposals"].is_array() || j["proposals"].empty()) {
    dataset_error(file, line, fmt::format("sample '{}' needs a non-empty 'proposals' array", s.sample_id));
  }
  for (const json& pj : j["proposals"]) {
    if (!pj.is_object()) dataset_error(file, line, "proposal must be a JSON object");
    Proposal p;
    if (!pj.contains("box")) dataset_error(file, line, "proposal missing 'box'");
    p.box = parse_box(pj["box"], file, line, "proposal box");
    if (!pj.contains("rpn_score") || !pj["rpn_score"].is_number()) {
      dataset_error(file, line, "proposal missing numeric 'rpn_score'");
    }
    p.rpn_score = pj["rpn_score"].get<double>();
    if (!(p.rpn_score >= 0.0 && p.rpn_score <= 1.0)) {
      dataset_error(file, line, fmt::format("rpn_score {} outside [0, 1]", p.rpn_score));
    }
    p.feat_row = parse_index(pj, "feat_row", file, line);
    s.proposals.push_back(p);
  }
  return s;
}

// Reads a headerless float32 little-endian matrix and widens it to double.
Matrix read_f32_matrix(const fs::path& file, std::size_t rows, std::size_t cols) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) dataset_error(file, "missing file");
  const auto actual = fs::file_size(file, ec);
  if (ec) dataset_error(file, fmt::format("cannot stat: {}", ec.message()));
  const std::uintmax_t expected = static_cast<std::uintmax_t>(rows) * cols * 4;
  if (actual != expected) {
    dataset_error(file, fmt::format(
        "dimension mismatch: expected {} bytes ({} rows x {} cols x 4), found {}",
        expected, rows, cols, actual));
  }
  std::ifstream in(file, std::ios::binary);
  std::vector<unsigned char> bytes(expected);
  if (!in.read(reinterpret_cast<char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()))) {
    dataset_error(file, "short read");
  }

  Matrix m(rows, cols);
  auto out = m.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const unsigned char* b = bytes.data() + 4 * i;
    const std::uint32_t u = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                            (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
    out[i] = static_cast<double>(std::bit_cast<float>(u));
  }

  for (std::size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (double v : m.row(r)) {
      if (!std::isfinite(v)) dataset_error(file, fmt::format("row {}: non-finite value", r));
      sq += v * v;
    }
    if (!(sq > 0.0)) dataset_error(file, fmt::format("row {}: zero-norm feature vector", r));
  }
  return m;
}

void write_f32(const fs::path& file, std::span<const float> values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto u = std::bit_cast<std::uint32_t>(values[i]);
    for (int k = 0; k < 4; ++k) bytes[4 * i + k] = static_cast<unsigned char>(u >> (8 * k));
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, fmt::format("{}: write failed", file.string()));
}

json box_json(const BoundingBox& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

}  // namespace

Matrix gather_proposal_features(const Dataset& dataset,
                                const GroundingSample& sample) {
  Matrix m(sample.proposals.size(), dataset.meta.d_img);
  for (std::size_t i = 0; i < sample.proposals.size(); ++i) {
    const auto src = dataset.features.image_feats.row(sample.proposals[i].feat_row);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  ds.meta = parse_meta(dir / kMetaFile);

  const fs::path manifest = dir / kManifestFile;
  std::ifstream in(manifest);
  if (!in) dataset_error(manifest, "missing file");
  std::string text;
  std::size_t line = 0;
  std::size_t total_proposals = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty() || text == "\r") continue;
    GroundingSample s = parse_sample(text, manifest, line);
    if (s.text_row >= ds.meta.num_samples) {
      dataset_error(manifest, line, fmt::format(
          "sample '{}': text_row {} out of range (num_samples {})",
          s.sample_id, s.text_row, ds.meta.num_samples));
    }
    std::set<std::size_t> rows;
    for (const Proposal& p : s.proposals) {
      if (p.feat_row >= ds.meta.num_proposal_rows) {
        dataset_error(manifest, line, fmt::format(
            "sample '{}': feat_row {} out of range (num_proposal_rows {})",
            s.sample_id, p.feat_row, ds.meta.num_proposal_rows));
      }
      if (!rows.insert(p.feat_row).second) {
        dataset_error(manifest, line, fmt::format(
            "sample '{}': feat_row {} repeated", s.sample_id, p.feat_row));
      }
    }
    total_proposals += s.proposals.size();
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.size() != ds.meta.num_samples) {
    dataset_error(manifest, fmt::format("{} records but meta.num_samples is {}",
                                        ds.samples.size(), ds.meta.num_samples));
  }
  if (total_proposals != ds.meta.num_proposal_rows) {
    dataset_error(manifest, fmt::format(
        "{} proposals in total but meta.num_proposal_rows is {}",
        total_proposals, ds.meta.num_proposal_rows));
  }

  ds.features.image_feats =
      read_f32_matrix(dir / kImageFeatsFile, ds.meta.num_proposal_rows, ds.meta.d_img);
  ds.features.text_feats =
      read_f32_matrix(dir / kTextFeatsFile, ds.meta.num_samples, ds.meta.d_txt);
  return ds;
}

void write_dataset(const fs::path& dir, const DatasetMeta& meta,
                   std::span<const GroundingSample> samples,
                   std::span<const float> image_feats,
                   std::span<const float> text_feats) {
  if (image_feats.size() != meta.num_proposal_rows * meta.d_img ||
      text_feats.size() != meta.num_samples * meta.d_txt ||
      samples.size() != meta.num_samples) {
    fail(ErrorKind::kDimension, "write_dataset: buffers disagree with meta");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, fmt::format("{}: {}", dir.string(), ec.message()));

  // Keys are emitted in sorted order by nlohmann::json, which keeps output
  // byte-stable across runs.
  json mj = {{"schema_version", meta.schema_version},
             {"d_img", meta.d_img},
             {"d_txt", meta.d_txt},
             {"num_samples", meta.num_samples},
             {"num_proposal_rows", meta.num_proposal_rows},
             {"dtype", meta.dtype},
             {"endianness", meta.endianness}};
  {
    std::ofstream out(dir / kMetaFile, std::ios::trunc);
    out << mj.dump(2) << '\n';
    if (!out) fail(ErrorKind::kIo, fmt::format("{}: write failed", (dir / kMetaFile).string()));
  }
  {
    std::ofstream out(dir / kManifestFile, std::ios::binary | std::ios::trunc);
    for (const GroundingSample& s : samples) {
      json props = json::array();
      for (const Proposal& p : s.proposals) {
        props.push_back({{"box", box_json(p.box)},
                         {"rpn_score", p.rpn_score},
                         {"feat_row", p.feat_row}});
      }
      json sj = {{"sample_id", s.sample_id},
                 {"command", s.command},
                 {"text_row", s.text_row},
                 {"gt_box", box_json(s.gt_box)},
                 {"proposals", std::move(props)}};
      out << sj.dump() << '\n';
    }
    if (!out) fail(ErrorKind::kIo, fmt::format("{}: write failed", (dir / kManifestFile).string()));
  }
  write_f32(dir / kImageFeatsFile, image_feats);
  write_f32(dir / kTextFeatsFile, text_feats);
}

}  // namespace vgrounding
