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

#include "edebt/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "edebt/error.hpp"
#include "edebt/rng.hpp"
#include "text_util.hpp"

namespace edebt {

double RateSegment::rate_at(double t) const {
  double r = base_rate;
  if (amplitude != 0.0) r += amplitude * std::sin(2.0 * std::numbers::pi * t / period);
  return r > 0.0 ? r : 0.0;
}

double RateProfile::rate_at(double t) const {
  for (const auto& s : segments)
    if (t >= s.start && t < s.end) return s.rate_at(t);
  if (!segments.empty() && t == segments.back().end) return segments.back().rate_at(t);
  return 0.0;
}

void RateProfile::validate() const {
  if (segments.empty()) throw ValidationError("rate profile has no segments");
  if (!(work_per_request > 0.0) || !std::isfinite(work_per_request))
    throw ValidationError("work per request must be positive");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const std::string where = "segment " + std::to_string(i + 1) + ": ";
    if (!std::isfinite(s.start) || !std::isfinite(s.end) || s.start < 0.0 || !(s.end > s.start))
      throw ValidationError(where + "needs 0 <= start < end");
    if (!std::isfinite(s.base_rate) || s.base_rate < 0.0)
      throw ValidationError(where + "base rate must be non-negative");
    if (!std::isfinite(s.amplitude)) throw ValidationError(where + "amplitude must be finite");
    if (!std::isfinite(s.period) || !(s.period > 0.0))
      throw ValidationError(where + "period must be positive");
    if (i > 0 && segments[i - 1].end != s.start)
      throw ValidationError(where + "segments must be contiguous");
  }
}

namespace {

// Arrivals at the instants where the integrated rate crosses an integer.
// `carry` is the fractional progress toward the next arrival and flows
// from one segment into the next.
void deterministic_segment(const RateSegment& seg, double from, double to, double work,
                           double& carry, std::vector<Request>& out) {
  auto emit = [&](double t) {
    out.push_back(Request{static_cast<RequestId>(out.size()), t, work, {}, {}});
  };

  if (seg.amplitude == 0.0) {
    const double r = std::max(0.0, seg.base_rate);
    if (r == 0.0) return;
    std::uint64_t j = 1;
    for (;; ++j) {
      double t = from + (static_cast<double>(j) - carry) / r;
      if (t > to) {
        if (t - to > 1e-9 * std::max(1.0, to)) break;
        t = to;
      }
      emit(t);
    }
    const double progress = carry + r * (to - from) - static_cast<double>(j - 1);
    carry = std::clamp(progress, 0.0, 1.0);
    if (carry >= 1.0) carry = 0.0;
    return;
  }

  const double step = std::min(0.05, seg.period / 2000.0);
  double t0 = from;
  while (t0 < to) {
    const double t1 = std::min(to, t0 + step);
    const double r = seg.rate_at(0.5 * (t0 + t1));
    double now = t0;
    double remaining = t1 - t0;
    if (r > 0.0) {
      while (carry + r * remaining >= 1.0) {
        const double dt = (1.0 - carry) / r;
        now += dt;
        remaining -= dt;
        carry = 0.0;
        emit(std::min(now, t1));
      }
      carry += r * remaining;
    }
    t0 = t1;
  }
}

void poisson_segment(const RateSegment& seg, double from, double to, double work, Rng& rng,
                     std::vector<Request>& out) {
  const double peak = std::max(0.0, seg.base_rate + std::abs(seg.amplitude));
  if (peak == 0.0) return;
  double t = from;
  for (;;) {
    t += rng.exponential(peak);
    if (t > to) break;
    const double accept = seg.rate_at(t) / peak;
    if (rng.uniform01() < accept)
      out.push_back(Request{static_cast<RequestId>(out.size()), t, work, {}, {}});
  }
}

}  // namespace

WorkloadTrace generate_trace(const RateProfile& profile, double duration, std::uint64_t seed) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("trace duration must be positive");
  profile.validate();

  WorkloadTrace trace;
  trace.duration = duration;
  Rng rng(seed);
  double carry = 0.0;
  for (const auto& seg : profile.segments) {
    const double from = std::max(0.0, seg.start);
    const double to = std::min(duration, seg.end);
    if (!(to > from)) continue;
    if (profile.arrival_mode == ArrivalMode::deterministic)
      deterministic_segment(seg, from, to, profile.work_per_request, carry, trace.requests);
    else
      poisson_segment(seg, from, to, profile.work_per_request, rng, trace.requests);
  }
  return trace;
}

namespace {

constexpr std::string_view kDurationTag = "duration";

}  // namespace

WorkloadTrace parse_trace(std::istream& in) {
  WorkloadTrace trace;
  std::optional<double> declared_duration;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      // "# duration <seconds>" carries the trace length; other comments are ignored.
      auto fields = detail::split_ws(body.substr(1));
      if (fields.size() == 2 && fields[0] == kDurationTag) {
        if (auto d = detail::parse_double(fields[1]); d && *d >= 0.0) declared_duration = *d;
      }
      continue;
    }
    auto fields = detail::split_ws(body);
    if (fields.size() != 2)
      throw ParseError(lineno, "expected 2 fields (arrival_time work), got " +
                                   std::to_string(fields.size()));
    auto arrival = detail::parse_double(fields[0]);
    if (!arrival) throw ParseError(lineno, "arrival time is not a number: '" + std::string(fields[0]) + "'");
    auto work = detail::parse_double(fields[1]);
    if (!work) throw ParseError(lineno, "work is not a number: '" + std::string(fields[1]) + "'");
    if (*arrival < 0.0)
      throw ValidationError("line " + std::to_string(lineno) + ": negative arrival time");
    if (!(*work > 0.0))
      throw ValidationError("line " + std::to_string(lineno) + ": work must be positive");
    trace.requests.push_back(Request{0, *arrival, *work, {}, {}});
  }

  std::stable_sort(trace.requests.begin(), trace.requests.end(),
                   [](const Request& a, const Request& b) { return a.arrival_time < b.arrival_time; });
  for (std::size_t i = 0; i < trace.requests.size(); ++i) trace.requests[i].id = i;

  const double last = trace.requests.empty() ? 0.0 : trace.requests.back().arrival_time;
  trace.duration = declared_duration ? std::max(*declared_duration, last) : last;
  return trace;
}

WorkloadTrace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

WorkloadTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  return parse_trace(in);
}

void write_trace(std::ostream& out, const WorkloadTrace& trace) {
  out << "# arrival_time_s work_mi\n";
  out << "# " << kDurationTag << ' ' << detail::format_double(trace.duration) << '\n';
  for (const auto& r : trace.requests)
    out << detail::format_double(r.arrival_time) << ' ' << detail::format_double(r.work) << '\n';
}

std::string serialize_trace(const WorkloadTrace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

RateProfile parse_profile(std::istream& in) {
  RateProfile profile;
  for (const auto& [lineno, key, value] : detail::read_key_values(in)) {
    if (key == "mode") {
      if (value == "deterministic") profile.arrival_mode = ArrivalMode::deterministic;
      else if (value == "poisson") profile.arrival_mode = ArrivalMode::poisson;
      else throw ParseError(lineno, "unknown arrival mode '" + value + "'");
    } else if (key == "duration") {
      profile.duration = detail::require_double(lineno, value);
    } else if (key == "work_mi") {
      profile.work_per_request = detail::require_double(lineno, value);
    } else if (key == "segment") {
      auto fields = detail::split_ws(value);
      if (fields.size() != 5)
        throw ParseError(lineno, "segment needs 5 fields: start end base_rate amplitude period");
      RateSegment s;
      s.start = detail::require_double(lineno, fields[0]);
      s.end = detail::require_double(lineno, fields[1]);
      s.base_rate = detail::require_double(lineno, fields[2]);
      s.amplitude = detail::require_double(lineno, fields[3]);
      s.period = detail::require_double(lineno, fields[4]);
      profile.segments.push_back(s);
    } else {
      throw ParseError(lineno, "unknown profile key '" + key + "'");
    }
  }
  profile.validate();
  return profile;
}

RateProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file '" + path + "'");
  return parse_profile(in);
}

}  // namespace edebt
