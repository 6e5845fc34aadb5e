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

#ifndef VGROUNDING_GRADCHECK_HPP_
#define VGROUNDING_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>

namespace vgrounding {

struct GradcheckConfig {
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  std::size_t min_proposals = 2, max_proposals = 64;
  std::size_t min_dim = 4, max_dim = 128;
  double step = 1e-6;
  double rel_tol = 1e-5;
  double abs_floor = 1e-8;
};

struct GradcheckReport {
  std::size_t trials = 0;
  std::size_t coordinates = 0;
  // Largest |analytic - numeric| / max(|analytic|, |numeric|, abs_floor / rel_tol).
  // The floor turns the absolute tolerance into a bound on the denominator, so
  // a coordinate passes exactly when this ratio is <= rel_tol.
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t failures = 0;

  bool passed() const { return failures == 0; }
};

/// Compares backward() against central finite differences of the loss on
/// every coordinate of W and b, over randomized problem sizes.
GradcheckReport run_gradcheck(const GradcheckConfig& cfg);

}  // namespace vgrounding

#endif  // VGROUNDING_GRADCHECK_HPP_
