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

#include "edebt/policies.hpp"
#include "edebt/sim.hpp"
#include "edebt/workload.hpp"

namespace edebt {

enum class PolicyKind { debt_aware, voting };

std::string_view to_string(PolicyKind p) noexcept;
std::optional<PolicyKind> policy_from_string(std::string_view s) noexcept;

/// Everything needed to reproduce one run. Exactly one of `profile` and
/// `trace_path` is set.
struct ExperimentConfig {
  SimConfig sim;
  std::optional<RateProfile> profile;
  std::optional<std::string> trace_path;
  PolicyKind policy = PolicyKind::debt_aware;
  LearningParams learning;
  VotingParams voting;
  StateThresholds thresholds;
  std::uint64_t seed = 1;
  /// Defaults to the workload duration.
  std::optional<double> horizon;
  std::string output_dir = "out";
  std::optional<std::string> qtable_in;
  bool record_debt = true;

  /// Throws ConfigError on invalid ranges or an ambiguous workload source.
  void validate() const;
};

/// Parses flat `key = value` text. Relative `profile`, `trace` and
/// `qtable_in` paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace edebt
