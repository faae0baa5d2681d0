// Copyright 2026 The ddsim Authors
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

#ifndef DDSIM_TEXT_IO_H
#define DDSIM_TEXT_IO_H

#include <string>
#include <string_view>
#include <vector>

namespace ddsim {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a whole token; throws ParseError on trailing garbage.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

/// Whitespace tokenizer.
std::vector<std::string_view> split_ws(std::string_view line);

std::string_view trim(std::string_view text);

/// Writes `contents` to `path`, throwing std::runtime_error with the path on failure.
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace ddsim

#endif
