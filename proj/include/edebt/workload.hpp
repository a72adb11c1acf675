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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edebt {

using RequestId = std::uint64_t;

/// One incoming job. `work` is in millions of instructions.
struct Request {
  RequestId id = 0;
  double arrival_time = 0.0;
  double work = 0.0;
  std::optional<double> start_time;
  std::optional<double> finish_time;

  bool operator==(const Request&) const = default;
};

/// Requests sorted by arrival time, all arriving within [0, duration].
struct WorkloadTrace {
  std::vector<Request> requests;
  double duration = 0.0;

  bool operator==(const WorkloadTrace&) const = default;
};

enum class ArrivalMode { deterministic, poisson };

/// A stretch of time with rate base_rate + amplitude * sin(2*pi*t/period),
/// clamped at zero. `t` is absolute trace time, so adjacent segments that
/// share amplitude and period join smoothly.
struct RateSegment {
  double start = 0.0;
  double end = 0.0;
  double base_rate = 0.0;
  double amplitude = 0.0;
  double period = 1.0;

  double rate_at(double t) const;
  bool operator==(const RateSegment&) const = default;
};

struct RateProfile {
  std::vector<RateSegment> segments;
  ArrivalMode arrival_mode = ArrivalMode::deterministic;
  double work_per_request = 2.0;
  /// Only used by profile files; generate_trace takes duration explicitly.
  std::optional<double> duration;

  /// Instantaneous rate; zero outside every segment.
  double rate_at(double t) const;
  /// Throws ValidationError on gaps, overlaps or bad numbers.
  void validate() const;
};

/// Synthesizes a trace. Deterministic mode places the k-th arrival where the
/// integrated rate reaches k; poisson mode draws a non-homogeneous Poisson
/// process by thinning. Pure function of its arguments.
WorkloadTrace generate_trace(const RateProfile& profile, double duration, std::uint64_t seed);

/// Reads `arrival_time_s work_mi` lines; `#` starts a comment line. Lines are
/// sorted by arrival and ids assigned in that order.
WorkloadTrace parse_trace(std::istream& in);
WorkloadTrace parse_trace(std::string_view text);
WorkloadTrace load_trace(const std::string& path);

/// Inverse of parse_trace. Values are written with round-trip precision.
void write_trace(std::ostream& out, const WorkloadTrace& trace);
std::string serialize_trace(const WorkloadTrace& trace);

/// Profile file: flat `key = value` lines (`mode`, `duration`, `work_mi`)
/// plus one `segment = start end base_rate amplitude period` line per segment.
RateProfile parse_profile(std::istream& in);
RateProfile load_profile(const std::string& path);

}  // namespace edebt
