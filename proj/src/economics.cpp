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

#include "edebt/economics.hpp"

#include <cmath>
#include <numeric>

#include "edebt/error.hpp"

namespace edebt {

RequestClass classify_request(double response_time, double sla_limit) {
  return response_time < sla_limit - kSlaTolerance ? RequestClass::success : RequestClass::failure;
}

std::uint64_t penalized_failures(std::uint64_t successes, std::uint64_t failures,
                                 const SimConfig& prices) {
  if (prices.sla_mode == SlaMode::per_request) return failures;
  const auto total = static_cast<double>(successes + failures);
  const auto tolerated = static_cast<std::uint64_t>(std::floor((1.0 - prices.sla_target) * total + 1e-9));
  return failures > tolerated ? failures - tolerated : 0;
}

UtilityBreakdown compute_utility(std::uint64_t successes, std::uint64_t failures,
                                 std::span<const std::uint64_t> charged_cycles_per_vm,
                                 const SimConfig& prices) {
  UtilityBreakdown u;
  u.successes = successes;
  u.failures = failures;
  u.penalized_failures = penalized_failures(successes, failures, prices);
  u.vm_cycles = std::accumulate(charged_cycles_per_vm.begin(), charged_cycles_per_vm.end(),
                                std::uint64_t{0});
  u.revenue = prices.price_per_request * static_cast<double>(successes);
  u.penalty = prices.penalty_per_request * static_cast<double>(u.penalized_failures);
  u.vm_cost = prices.vm_cost_per_cycle * static_cast<double>(u.vm_cycles);
  u.utility = u.revenue - u.penalty - u.vm_cost;
  return u;
}

UtilityBreakdown window_utility(const SimCounters& from, const SimCounters& to, double window_start,
                                double window_end, const SimConfig& prices) {
  const std::uint64_t cycles = to.cycles_charged - from.cycles_charged;
  auto u = compute_utility(to.successes - from.successes, to.failures - from.failures,
                           std::span<const std::uint64_t>(&cycles, 1), prices);
  u.window_start = window_start;
  u.window_end = window_end;
  return u;
}

double compute_debt(double u_actual, double u_ideal) { return u_actual - u_ideal; }

CounterfactualResult counterfactual_ideal(const Simulator& checkpoint,
                                          std::span<const Action> candidates, double window_end) {
  if (candidates.empty()) throw SimulationError("counterfactual replay needs at least one candidate action");
  if (window_end < checkpoint.now()) throw SimulationError("counterfactual window ends before checkpoint");

  CounterfactualResult result;
  bool have_best = false;
  for (Action a : candidates) {
    if (!is_valid(a)) throw SimulationError("invalid candidate action");
    if (result.per_action[index_of(a)]) continue;
    Simulator replay = checkpoint.fork();
    const SimCounters before = replay.counters();
    replay.apply(a);
    result.provisioned_after[index_of(a)] = replay.provisioned_vms();
    replay.advance_to(window_end);
    const double u =
        window_utility(before, replay.counters(), checkpoint.now(), window_end, replay.config()).utility;
    result.per_action[index_of(a)] = u;
    const bool better = !have_best || u > result.u_ideal ||
                        (u == result.u_ideal && index_of(a) < index_of(result.ideal_action));
    if (better) {
      result.u_ideal = u;
      result.ideal_action = a;
      have_best = true;
    }
  }
  return result;
}

}  // namespace edebt
