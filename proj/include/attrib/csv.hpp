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

#include <string>
#include <string_view>
#include <vector>

namespace attrib::csv {

// Minimal RFC 4180 field handling: comma separated, optional double quotes,
// "" as an escaped quote.  Embedded newlines are not supported.

/// Splits one line into fields.  Throws kData on an unterminated quote.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only if it contains a comma, quote or leading/trailing
/// whitespace.
std::string escape(std::string_view field);

std::string_view trim(std::string_view text);

}  // namespace attrib::csv
