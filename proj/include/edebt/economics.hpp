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
#include <optional>
#include <span>

#include "edebt/action.hpp"
#include "edebt/sim.hpp"

namespace edebt {

enum class RequestClass { success, failure };

/// Strict: success iff response_time < sla_limit. Response times within
/// kSlaTolerance of the limit count as reaching it, so FIFO sums such as
/// ten 0.2 s services (1.9999999999999998) still fail a 2 s limit.
inline constexpr double kSlaTolerance = 1e-9;
RequestClass classify_request(double response_time, double sla_limit);

/// Revenue, penalty and VM cost of one monitoring window.
struct UtilityBreakdown {
  double window_start = 0.0;
  double window_end = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t penalized_failures = 0;
  std::uint64_t vm_cycles = 0;
  double revenue = 0.0;
  double penalty = 0.0;
  double vm_cost = 0.0;
  double utility = 0.0;
};

/// Failures that draw a penalty under the configured SLA mode.
std::uint64_t penalized_failures(std::uint64_t successes, std::uint64_t failures, const SimConfig& prices);

/// revenue - penalty - cost, with one entry of `charged_cycles_per_vm` per VM.
UtilityBreakdown compute_utility(std::uint64_t successes, std::uint64_t failures,
                                 std::span<const std::uint64_t> charged_cycles_per_vm,
                                 const SimConfig& prices);

/// Utility of the window between two counter snapshots of one run.
UtilityBreakdown window_utility(const SimCounters& from, const SimCounters& to, double window_start,
                                double window_end, const SimConfig& prices);

/// actual - ideal; never positive when ideal is a maximum that includes actual.
double compute_debt(double u_actual, double u_ideal);

struct CounterfactualResult {
  double u_ideal = 0.0;
  Action ideal_action = Action::maintain;
  /// Indexed by index_of(Action); empty for actions outside the candidate set.
  std::array<std::optional<double>, 3> per_action{};
  /// VMs provisioned right after each candidate was applied.
  std::array<std::optional<std::size_t>, 3> provisioned_after{};

  std::optional<double> utility_of(Action a) const { return per_action[index_of(a)]; }
};

/// Replays the window (checkpoint.now(), window_end] once per candidate on a
/// private clone, with no further adaptations, and keeps the best utility.
/// Ties resolve to the earliest action in maintain < launch < release order.
/// Throws SimulationError for an empty candidate set.
CounterfactualResult counterfactual_ideal(const Simulator& checkpoint,
                                          std::span<const Action> candidates, double window_end);

}  // namespace edebt
