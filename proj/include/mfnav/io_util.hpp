/*
 * Copyright 2026 The mfnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MFNAV_IO_UTIL_HPP_
#define MFNAV_IO_UTIL_HPP_

#include <string>
#include <vector>

namespace mfnav {

// Shortest round-trippable decimal form of a double ("%.17g" fallback).
std::string format_double(double v);

double parse_double(const std::string& token, const std::string& context);
long parse_long(const std::string& token, const std::string& context);

std::vector<std::string> split(const std::string& line, char sep);
std::vector<std::string> split_ws(const std::string& line);

// Whole file as lines, LF or CRLF tolerated. Throws ValidationError if the
// file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

bool file_exists(const std::string& path);

}  // namespace mfnav

#endif  // MFNAV_IO_UTIL_HPP_
