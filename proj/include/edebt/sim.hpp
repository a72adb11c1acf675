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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

#include "edebt/action.hpp"
#include "edebt/workload.hpp"

namespace edebt {

using VmId = std::uint64_t;

enum class BillingAnchor { at_request, at_ready };

/// How failed requests turn into penalties.
enum class SlaMode {
  per_request,  ///< every failed request is penalized
  floor,        ///< only failures beyond (1 - sla_target) of the window are penalized
};

struct SimConfig {
  double spin_up = 105.0;
  double cool_down = 120.0;
  double billing_cycle = 300.0;
  double decision_interval = 60.0;
  double vm_capacity = 10.0;        // MIPS
  double work_per_request = 2.0;    // MI
  double sla_response_limit = 2.0;  // seconds, strict
  double price_per_request = 0.0012344;
  double penalty_per_request = 0.002;
  double vm_cost_per_cycle = 0.01111;
  int initial_vms = 1;
  BillingAnchor billing_anchor = BillingAnchor::at_request;
  /// A VM is "close to its next billing cycle" when the next charge is at
  /// most this many seconds away.
  double close_to_cycle = 60.0;
  SlaMode sla_mode = SlaMode::per_request;
  double sla_target = 0.95;

  /// Throws ConfigError.
  void validate() const;
};

struct QueuedRequest {
  std::size_t index = 0;  // position in the trace
  double arrival = 0.0;
  double work = 0.0;
};

struct VmInstance {
  VmId id = 0;
  double capacity = 0.0;
  double requested_at = 0.0;
  double ready_at = 0.0;
  double billing_anchor = 0.0;
  std::optional<double> released_at;
  std::deque<QueuedRequest> queue;  // waiting, excludes the one in service
  std::optional<QueuedRequest> in_service;
  double service_start = 0.0;
  double busy_until = 0.0;
  std::uint64_t cycles_charged = 0;
  /// Merged busy intervals, pruned to the recent past.
  std::deque<std::pair<double, double>> busy_log;

  bool released() const noexcept { return released_at.has_value(); }
  bool is_ready(double now) const noexcept { return ready_at <= now; }
  std::size_t outstanding() const noexcept { return queue.size() + (in_service ? 1 : 0); }
  bool idle() const noexcept { return !in_service && queue.empty(); }
  /// Seconds until the next cycle charge; 0 when one is due right now.
  double time_to_charge(double now, double cycle) const;
};

/// Seconds needed to execute `work` MI on `vm`.
double service_time(const Request& request, const VmInstance& vm);
double service_time(double work, double capacity);

/// Cycles billed for `vm` when the run ends at `horizon`: every cycle started
/// at or after the anchor and before the release (or horizon) is charged in full.
std::uint64_t billing_cycles_charged(const VmInstance& vm, double horizon, double cycle);

/// Busy fraction of `vm` over the ready part of [window_start, window_end],
/// evaluated at simulation time `now` (>= window_end). 0 if never ready in the window.
double utilization(const VmInstance& vm, double window_start, double window_end, double now);

/// Snapshot the policy sees at a decision point.
struct ClusterObservation {
  double time = 0.0;
  std::size_t ready_vms = 0;
  std::size_t pending_vms = 0;
  double frac_vms_with_queue = 0.0;
  double frac_vms_idle_near_cycle = 0.0;
  std::vector<double> per_vm_utilization;
  std::uint64_t window_successes = 0;
  std::uint64_t window_failures = 0;
};

/// Event kinds; enumerator order is the tie-break order at equal timestamps.
enum class EventKind : std::uint8_t {
  request_done = 0,
  vm_ready = 1,
  arrival = 2,
  decision_point = 3,
  vm_cycle_boundary = 4,
};

std::string_view to_string(EventKind k) noexcept;

struct SimEvent {
  double time = 0.0;
  EventKind kind = EventKind::arrival;
  std::uint64_t id = 0;  // VM id, or trace index for arrivals
  std::uint64_t seq = 0;

  /// Total order: time, then kind, then id, then insertion order.
  bool before(const SimEvent& other) const noexcept;
};

/// Cumulative counters; window figures are differences of two snapshots.
struct SimCounters {
  std::uint64_t submitted = 0;
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t cycles_charged = 0;

  bool operator==(const SimCounters&) const = default;
};

/// Final fate of one request, logged in the primary run only.
struct RequestOutcome {
  RequestId id = 0;
  double arrival = 0.0;
  double start = 0.0;
  double finish = 0.0;
  VmId vm = 0;
  bool success = false;
};

/// Discrete-event engine. Copying a Simulator yields an independent clone
/// that shares only the immutable trace; see fork().
class Simulator {
 public:
  Simulator(SimConfig config, std::shared_ptr<const WorkloadTrace> trace);

  /// Processes every event ordered before a decision point at `t` and moves
  /// the clock to `t`. Requires t >= now().
  void advance_to(double t);

  /// Clone for counterfactual replay. Logs are not carried over.
  Simulator fork() const;

  VmId launch_vm();
  /// Throws SimulationError for unknown or already released VMs.
  void release_vm(VmId id);
  /// Victim for a release: idle VM with the nearest charge, else the one
  /// with the fewest outstanding requests. nullopt if fewer than two VMs remain.
  std::optional<VmId> release_candidate() const;
  /// Applies one adaptation at now(); returns the action actually taken
  /// (a release that would remove the last VM becomes maintain).
  Action apply(Action action);

  /// Chooses the VM for a new request; nullopt when no VM accepts work.
  std::optional<VmId> pick_vm() const;

  /// Snapshot at now(). Utilization covers [window_start, now()]; window
  /// counts are left for the caller to fill.
  ClusterObservation observe(double window_start) const;

  double now() const noexcept { return now_; }
  const SimConfig& config() const noexcept { return config_; }
  const SimCounters& counters() const noexcept { return counters_; }
  const std::vector<VmInstance>& vms() const noexcept { return vms_; }
  const VmInstance& vm(VmId id) const;
  std::size_t provisioned_vms() const;  // not released
  std::size_t backlog_size() const noexcept { return backlog_.size(); }
  /// Requests that arrived but are neither success nor failure yet.
  std::uint64_t unresolved() const noexcept;
  const WorkloadTrace& trace() const noexcept { return *trace_; }

  void enable_outcome_log();
  void enable_event_log();
  const std::vector<RequestOutcome>& outcomes() const;
  const std::vector<SimEvent>& event_log() const;

 private:
  VmId add_vm(double spin_up);
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const noexcept { return b.before(a); }
  };
  struct DeadlineEntry {
    double deadline;
    bool succeeded;
  };

  void push(double time, EventKind kind, std::uint64_t id);
  void process(const SimEvent& e);
  void on_arrival(std::size_t index);
  void on_done(VmId id);
  void on_ready(VmId id);
  void on_cycle_boundary(VmId id, double time);
  void dispatch(const QueuedRequest& r);
  void start_next(VmInstance& vm);
  void drain_backlog();
  void sweep_deadlines(double t);
  void prune_busy_logs();

  SimConfig config_;
  std::shared_ptr<const WorkloadTrace> trace_;
  double now_ = 0.0;
  std::size_t next_arrival_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> events_;
  std::vector<VmInstance> vms_;
  std::deque<QueuedRequest> backlog_;
  std::deque<DeadlineEntry> deadlines_;
  std::size_t deadline_base_ = 0;  // trace index of deadlines_.front()
  SimCounters counters_;
  std::shared_ptr<std::vector<RequestOutcome>> outcome_log_;
  std::shared_ptr<std::vector<SimEvent>> event_log_;
};

}  // namespace edebt
