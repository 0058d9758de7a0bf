// Copyright 2026 The c2v Authors
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

// Internal string helpers shared by the parsers.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace c2v::detail {

std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);
std::string trim_cr(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::vector<std::string> split_lines(std::string_view s);

/// Runs of whitespace become one space; leading/trailing whitespace removed.
std::string collapse_whitespace(std::string_view s);

/// Decodes named and numeric character references. References that decode
/// to markup-significant characters (< > &) become a space so the decoded
/// text never re-enters the markup path.
std::string decode_entities(std::string_view s);

void append_utf8(std::string& out, std::uint32_t codepoint);

/// Tabs, carriage returns and newlines replaced by spaces.
std::string fold_field(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Shortest text that reads back to the same double.
std::string format_double(double value);

}  // namespace c2v::detail
