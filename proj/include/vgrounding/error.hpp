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

#ifndef VGROUNDING_ERROR_HPP_
#define VGROUNDING_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace vgrounding {

/// Broad failure category. The CLI maps each kind to a process exit code.
enum class ErrorKind {
  kConfig,     // invalid arguments or configuration values
  kDataset,    // missing / malformed dataset files, bad cross references
  kFormat,     // checkpoint header or size problems
  kDimension,  // shape disagreement between model, data and arguments
  kNumeric,    // degenerate model state, non-finite values
  kIo,         // filesystem failures while writing artifacts
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace vgrounding

#endif  // VGROUNDING_ERROR_HPP_
