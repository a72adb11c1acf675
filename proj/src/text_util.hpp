// Copyright 2026 The edebt Authors
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

// Small text helpers shared by the trace, profile, config and CSV readers.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edebt/error.hpp"

namespace edebt::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Finite double or nullopt. The whole token must be consumed.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline double require_double(std::size_t line, std::string_view s) {
  auto v = parse_double(s);
  if (!v) throw ParseError(line, "not a number: '" + std::string(s) + "'");
  return *v;
}

inline long long require_int(std::size_t line, std::string_view s) {
  auto v = parse_int(s);
  if (!v) throw ParseError(line, "not an integer: '" + std::string(s) + "'");
  return *v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Fixed-point with `digits` decimals; negative zero prints as zero.
inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf, n > 0 ? static_cast<std::size_t>(n) : 0);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

struct KeyValue {
  std::size_t line;
  std::string key;
  std::string value;
};

/// `key = value` lines; blank lines and `#` comments skipped.
inline std::vector<KeyValue> read_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto body = trim(raw);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    auto key = trim(body.substr(0, eq));
    auto value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    out.push_back({lineno, std::string(key), std::string(value)});
  }
  return out;
}

}  // namespace edebt::detail
