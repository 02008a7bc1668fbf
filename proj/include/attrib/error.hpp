// Copyright 2026 The attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace attrib {

enum class ErrorKind {
  kUsage,
  kData,
  kConfig,
  kInvalidChannel,
  kCapacity,
  kPrecondition,
  kInvariant,
  kNoData,
  kNoAttribution,
};

std::string_view to_string(ErrorKind kind);

/// Process exit status for an error category:
/// 2 usage, 3 data, 4 capacity, 5 invariant failure.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace attrib
