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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

#include <fmt/format.h>

#include "vgrounding/error.hpp"
#include "vgrounding/model.hpp"

namespace vgrounding {
namespace {

constexpr std::string_view kMagic = "CMSVGCK1";
constexpr std::size_t kHeaderBytes = 8 + 4 + 4;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>(v >> (8 * k)));
}

void put_f64(std::vector<unsigned char>& out, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<unsigned char>(u >> (8 * k)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= std::uint32_t{p[k]} << (8 * k);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t{p[k]} << (8 * k);
  return std::bit_cast<double>(v);
}

}  // namespace

void save_checkpoint(const TransformModel& model,
                     const std::filesystem::path& path) {
  if (model.d_img() > std::numeric_limits<std::uint32_t>::max() ||
      model.d_txt() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::kDimension, "model too large for checkpoint format");
  }
  std::vector<unsigned char> bytes;
  bytes.reserve(kHeaderBytes + 8 * (model.weight.size() + model.bias.size()));
  bytes.insert(bytes.end(), kMagic.begin(), kMagic.end());
  put_u32(bytes, static_cast<std::uint32_t>(model.d_img()));
  put_u32(bytes, static_cast<std::uint32_t>(model.d_txt()));
  for (double w : model.weight.values()) put_f64(bytes, w);
  for (double b : model.bias) put_f64(bytes, b);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, fmt::format("{}: cannot write checkpoint", path.string()));
}

TransformModel load_checkpoint(const std::filesystem::path& path,
                               std::optional<ExpectedDims> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, fmt::format("{}: cannot open checkpoint", path.string()));
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());

  if (bytes.size() < kHeaderBytes) {
    fail(ErrorKind::kFormat, fmt::format("{}: truncated checkpoint header", path.string()));
  }
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    fail(ErrorKind::kFormat, fmt::format("{}: bad checkpoint magic", path.string()));
  }
  const std::size_t d_img = get_u32(bytes.data() + 8);
  const std::size_t d_txt = get_u32(bytes.data() + 12);
  if (d_img == 0 || d_txt == 0) {
    fail(ErrorKind::kFormat, fmt::format("{}: zero checkpoint dimension", path.string()));
  }
  const std::size_t want = kHeaderBytes + 8 * (d_img * d_txt + d_img);
  if (bytes.size() != want) {
    fail(ErrorKind::kFormat, fmt::format("{}: expected {} bytes for {}x{} model, found {}",
                                         path.string(), want, d_img, d_txt, bytes.size()));
  }
  if (expected && (expected->d_img != d_img || expected->d_txt != d_txt)) {
    fail(ErrorKind::kDimension,
         fmt::format("{}: checkpoint is d_img={} d_txt={}, dataset needs d_img={} d_txt={}",
                     path.string(), d_img, d_txt, expected->d_img, expected->d_txt));
  }

  TransformModel model(d_img, d_txt);
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (double& w : model.weight.values()) {
    w = get_f64(p);
    p += 8;
  }
  for (double& b : model.bias) {
    b = get_f64(p);
    p += 8;
  }
  return model;
}

}  // namespace vgrounding
