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

#ifndef VGROUNDING_SEEDING_HPP_
#define VGROUNDING_SEEDING_HPP_

#include <cstdint>
#include <random>

namespace vgrounding {

// Independent generator streams derived from one run seed, so that changing
// how data is shuffled never perturbs parameter initialization.
enum class SeedStream : std::uint32_t {
  kInit = 0,
  kShuffle = 1,
  kGradcheck = 2,
  kSynthetic = 3,
};

inline std::mt19937_64 make_engine(std::uint64_t seed, SeedStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace vgrounding

#endif  // VGROUNDING_SEEDING_HPP_
