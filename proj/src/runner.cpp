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

#include "edebt/runner.hpp"

#include <cmath>
#include <limits>

#include "edebt/error.hpp"

namespace edebt {

namespace {

std::vector<double> decision_ticks(double interval, double horizon) {
  std::vector<double> ticks;
  for (std::uint64_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * interval;
    if (t >= horizon) break;
    ticks.push_back(t);
  }
  ticks.push_back(horizon);
  return ticks;
}

void fill_debt(AdaptationRecord& rec, const CounterfactualResult& cf, double window_end) {
  rec.evaluated = true;
  rec.window_end = window_end;
  rec.per_action_utilities = cf.per_action;
  rec.u_actual = *cf.utility_of(rec.action_taken);
  rec.u_ideal = cf.u_ideal;
  rec.debt = compute_debt(rec.u_actual, rec.u_ideal);
  rec.ideal_action = cf.ideal_action;
  rec.ideal_provisioned = *cf.provisioned_after[index_of(cf.ideal_action)];
}

}  // namespace

SimulationResult run(const SimConfig& config, std::shared_ptr<const WorkloadTrace> trace, Policy& policy,
                     const RunOptions& options) {
  config.validate();
  if (!trace) throw SimulationError("run needs a trace");
  if (!(options.horizon > 0.0) || !std::isfinite(options.horizon))
    throw SimulationError("horizon must be positive");
  if (!trace->requests.empty() && trace->requests.back().arrival_time > options.horizon)
    throw SimulationError("trace extends past the simulation horizon");

  Simulator sim(config, trace);
  if (options.log_outcomes) sim.enable_outcome_log();

  SimulationResult result;
  result.policy = std::string(policy.name());
  result.horizon = options.horizon;

  const bool proactive = policy.debt_mode() == DebtMode::proactive;
  const bool record_debt = proactive || options.record_debt;

  struct Checkpoint {
    std::size_t record;
    Simulator state;
  };
  std::optional<Checkpoint> retro;
  std::optional<std::size_t> awaiting_reward;
  double last_adaptation = -std::numeric_limits<double>::infinity();
  double prev_time = 0.0;
  SimCounters prev = sim.counters();
  double cumulative = 0.0;

  for (double t : decision_ticks(config.decision_interval, options.horizon)) {
    sim.advance_to(t);
    const bool at_horizon = t >= options.horizon;
    const bool can_decide = !at_horizon && t - last_adaptation >= config.cool_down - 1e-9;

    WindowRow row;
    row.start = prev_time;
    row.end = t;
    row.submitted = sim.counters().submitted - prev.submitted;
    row.utility = window_utility(prev, sim.counters(), prev_time, t, config);

    if (retro && (can_decide || at_horizon)) {
      auto cf = counterfactual_ideal(retro->state, kAllActions, t);
      fill_debt(result.records[retro->record], cf, t);
      retro.reset();
    }

    ClusterObservation obs = sim.observe(t - config.decision_interval);
    obs.window_successes = sim.counters().successes - prev.successes;
    obs.window_failures = sim.counters().failures - prev.failures;

    if (awaiting_reward && (can_decide || at_horizon)) {
      policy.observe_reward(result.records[*awaiting_reward].debt, obs);
      awaiting_reward.reset();
    }

    if (can_decide) {
      const Action requested = policy.decide(obs);
      if (!is_valid(requested))
        throw SimulationError("policy returned invalid action value " +
                              std::to_string(static_cast<int>(requested)));
      std::optional<Simulator> checkpoint;
      if (record_debt) checkpoint = sim.fork();

      AdaptationRecord rec;
      rec.time = t;
      rec.state = discretize_state(obs, options.thresholds);
      rec.requested = requested;
      rec.action_taken = sim.apply(requested);
      rec.provisioned_after = sim.provisioned_vms();
      rec.ideal_provisioned = rec.provisioned_after;
      if (rec.action_taken != Action::maintain) last_adaptation = t;

      result.records.push_back(rec);
      const std::size_t index = result.records.size() - 1;
      row.record = index;
      if (proactive) {
        const double end = std::min(t + config.decision_interval + config.billing_cycle, options.horizon);
        auto cf = counterfactual_ideal(*checkpoint, kAllActions, end);
        fill_debt(result.records[index], cf, end);
        awaiting_reward = index;
      } else if (record_debt) {
        retro = Checkpoint{index, std::move(*checkpoint)};
      }
    }

    const auto after = sim.observe(t);
    row.ready_vms = after.ready_vms;
    row.pending_vms = after.pending_vms;
    row.provisioned_vms = sim.provisioned_vms();
    row.ideal_vms = row.provisioned_vms;
    cumulative += row.utility.utility;
    row.cumulative_utility = cumulative;
    result.windows.push_back(row);

    prev = sim.counters();
    prev_time = t;
  }

  // Ideal provisioning is known only once each record's window has been replayed.
  for (auto& row : result.windows)
    if (row.record && result.records[*row.record].evaluated)
      row.ideal_vms = result.records[*row.record].ideal_provisioned;

  result.totals = sim.counters();
  result.aggregate = window_utility(SimCounters{}, sim.counters(), 0.0, options.horizon, config);
  for (const auto& vm : sim.vms()) result.cycles_per_vm.push_back(vm.cycles_charged);
  if (options.log_outcomes) result.outcomes = sim.outcomes();
  return result;
}

}  // namespace edebt
