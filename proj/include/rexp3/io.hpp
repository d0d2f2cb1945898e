// Copyright 2026 The rexp3 Authors.
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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rexp3::io {

// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double value);

// Splits one CSV line on commas. Quoting is not supported; none of the
// formats written here need it.
std::vector<std::string> split_csv_line(std::string_view line);

// Parses the whole field as a double; throws std::invalid_argument otherwise.
double parse_double(const std::string& field);
long long parse_integer(const std::string& field);

// Writes `text` as `# `-prefixed comment lines (one per input line).
void write_comment_block(std::ostream& out, std::string_view text);

// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);
// Writes `contents` to `path`, replacing it.
void write_file(const std::string& path, std::string_view contents);

}  // namespace rexp3::io
