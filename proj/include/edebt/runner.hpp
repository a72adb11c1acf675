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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edebt/economics.hpp"
#include "edebt/policies.hpp"
#include "edebt/sim.hpp"
#include "edebt/workload.hpp"

namespace edebt {

/// One decision point at which the policy was consulted.
struct AdaptationRecord {
  double time = 0.0;
  StateKey state;
  Action requested = Action::maintain;     // what the policy asked for
  Action action_taken = Action::maintain;  // what the cluster did
  std::size_t provisioned_after = 0;
  /// False when debt recording was switched off for this run.
  bool evaluated = false;
  double window_end = 0.0;
  double u_actual = 0.0;
  double u_ideal = 0.0;
  double debt = 0.0;
  Action ideal_action = Action::maintain;
  std::size_t ideal_provisioned = 0;
  std::array<std::optional<double>, 3> per_action_utilities{};
};

/// Metrics for one decision interval (start, end].
struct WindowRow {
  double start = 0.0;
  double end = 0.0;
  std::size_t ready_vms = 0;
  std::size_t pending_vms = 0;
  std::size_t provisioned_vms = 0;
  std::size_t ideal_vms = 0;
  std::uint64_t submitted = 0;
  UtilityBreakdown utility;
  double cumulative_utility = 0.0;
  std::optional<std::size_t> record;  // index into SimulationResult::records
};

struct SimulationResult {
  std::string policy;
  double horizon = 0.0;
  std::vector<WindowRow> windows;
  std::vector<AdaptationRecord> records;
  std::vector<RequestOutcome> outcomes;
  std::vector<std::uint64_t> cycles_per_vm;
  SimCounters totals;
  UtilityBreakdown aggregate;
};

struct RunOptions {
  double horizon = 0.0;
  /// Compute counterfactual debts for retrospective policies. Proactive
  /// policies always need them as rewards.
  bool record_debt = true;
  bool log_outcomes = true;
  /// Used only to label adaptation records.
  StateThresholds thresholds;
};

/// Drives one simulation: decision points every decision_interval (skipped
/// while inside the cool-down of the last launch or release), one adaptation
/// record per consulted decision, and per-window utility accounting.
/// Throws SimulationError if the policy returns an invalid action or the
/// trace extends past the horizon.
SimulationResult run(const SimConfig& config, std::shared_ptr<const WorkloadTrace> trace, Policy& policy,
                     const RunOptions& options);

}  // namespace edebt
