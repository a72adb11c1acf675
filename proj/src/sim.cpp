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

#include "edebt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edebt/economics.hpp"
#include "edebt/error.hpp"

namespace edebt {

void SimConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(spin_up, "spin_up");
  positive(cool_down, "cool_down");
  positive(billing_cycle, "billing_cycle");
  positive(decision_interval, "decision_interval");
  positive(vm_capacity, "vm_capacity");
  positive(work_per_request, "work_per_request");
  positive(sla_response_limit, "sla_response_limit");
  positive(price_per_request, "price_per_request");
  positive(penalty_per_request, "penalty_per_request");
  positive(vm_cost_per_cycle, "vm_cost_per_cycle");
  if (initial_vms < 1) throw ConfigError("initial_vms must be at least 1");
  if (!(close_to_cycle >= 0.0) || close_to_cycle > billing_cycle)
    throw ConfigError("close_to_cycle must lie in [0, billing_cycle]");
  if (!(sla_target > 0.0) || sla_target > 1.0) throw ConfigError("sla_target must lie in (0, 1]");
}

double VmInstance::time_to_charge(double now, double cycle) const {
  if (now < billing_anchor) return billing_anchor - now;
  const double r = std::fmod(now - billing_anchor, cycle);
  return r == 0.0 ? 0.0 : cycle - r;
}

double service_time(double work, double capacity) { return work / capacity; }

double service_time(const Request& request, const VmInstance& vm) {
  return service_time(request.work, vm.capacity);
}

std::uint64_t billing_cycles_charged(const VmInstance& vm, double horizon, double cycle) {
  const double end = vm.released_at ? std::min(*vm.released_at, horizon) : horizon;
  if (!(end > vm.billing_anchor)) return 0;
  return static_cast<std::uint64_t>(std::ceil((end - vm.billing_anchor) / cycle));
}

double utilization(const VmInstance& vm, double window_start, double window_end, double now) {
  const double from = std::max(window_start, vm.ready_at);
  const double to = window_end;
  if (!(to > from)) return 0.0;
  auto overlap = [&](double a, double b) { return std::max(0.0, std::min(b, to) - std::max(a, from)); };
  double busy = 0.0;
  for (const auto& [a, b] : vm.busy_log) busy += overlap(a, b);
  if (vm.in_service) busy += overlap(vm.service_start, now);
  return std::clamp(busy / (to - from), 0.0, 1.0);
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::request_done: return "request_done";
    case EventKind::vm_ready: return "vm_ready";
    case EventKind::arrival: return "arrival";
    case EventKind::decision_point: return "decision_point";
    case EventKind::vm_cycle_boundary: return "vm_cycle_boundary";
  }
  return "unknown";
}

bool SimEvent::before(const SimEvent& o) const noexcept {
  if (time != o.time) return time < o.time;
  if (kind != o.kind) return kind < o.kind;
  if (id != o.id) return id < o.id;
  return seq < o.seq;
}

Simulator::Simulator(SimConfig config, std::shared_ptr<const WorkloadTrace> trace)
    : config_(config), trace_(std::move(trace)) {
  config_.validate();
  if (!trace_) throw SimulationError("simulator needs a trace");
  // The initial fleet is already running when the horizon starts.
  for (int i = 0; i < config_.initial_vms; ++i) add_vm(0.0);
}

Simulator Simulator::fork() const {
  Simulator copy = *this;
  copy.outcome_log_.reset();
  copy.event_log_.reset();
  return copy;
}

const VmInstance& Simulator::vm(VmId id) const {
  if (id >= vms_.size()) throw SimulationError("unknown VM " + std::to_string(id));
  return vms_[id];
}

std::size_t Simulator::provisioned_vms() const {
  return static_cast<std::size_t>(
      std::count_if(vms_.begin(), vms_.end(), [](const VmInstance& v) { return !v.released(); }));
}

std::uint64_t Simulator::unresolved() const noexcept {
  return counters_.submitted - counters_.successes - counters_.failures;
}

void Simulator::enable_outcome_log() {
  if (!outcome_log_) outcome_log_ = std::make_shared<std::vector<RequestOutcome>>();
}

void Simulator::enable_event_log() {
  if (!event_log_) event_log_ = std::make_shared<std::vector<SimEvent>>();
}

const std::vector<RequestOutcome>& Simulator::outcomes() const {
  static const std::vector<RequestOutcome> empty;
  return outcome_log_ ? *outcome_log_ : empty;
}

const std::vector<SimEvent>& Simulator::event_log() const {
  static const std::vector<SimEvent> empty;
  return event_log_ ? *event_log_ : empty;
}

void Simulator::push(double time, EventKind kind, std::uint64_t id) {
  events_.push(SimEvent{time, kind, id, seq_++});
}

void Simulator::advance_to(double t) {
  if (t < now_) throw SimulationError("cannot move simulation clock backwards");
  const SimEvent marker{t, EventKind::decision_point, 0, 0};
  const auto& requests = trace_->requests;
  for (;;) {
    std::optional<SimEvent> next;
    if (!events_.empty() && events_.top().before(marker)) next = events_.top();
    if (next_arrival_ < requests.size() && requests[next_arrival_].arrival_time <= t) {
      SimEvent arrival{requests[next_arrival_].arrival_time, EventKind::arrival, next_arrival_, 0};
      if (!next || arrival.before(*next)) next = arrival;
    }
    if (!next) break;
    if (next->kind == EventKind::arrival) ++next_arrival_;
    else events_.pop();
    now_ = next->time;
    if (event_log_) event_log_->push_back(*next);
    process(*next);
  }
  now_ = t;
  sweep_deadlines(t);
  prune_busy_logs();
}

void Simulator::process(const SimEvent& e) {
  switch (e.kind) {
    case EventKind::arrival: on_arrival(e.id); break;
    case EventKind::request_done: on_done(e.id); break;
    case EventKind::vm_ready: on_ready(e.id); break;
    case EventKind::vm_cycle_boundary: on_cycle_boundary(e.id, e.time); break;
    case EventKind::decision_point: break;
  }
}

void Simulator::on_arrival(std::size_t index) {
  const Request& r = trace_->requests[index];
  ++counters_.submitted;
  if (deadlines_.empty()) deadline_base_ = index;
  deadlines_.push_back({r.arrival_time + config_.sla_response_limit, false});
  dispatch(QueuedRequest{index, r.arrival_time, r.work});
}

std::optional<VmId> Simulator::pick_vm() const {
  // Least outstanding work among ready VMs; spinning-up VMs only take
  // requests when nothing is ready yet.
  std::optional<VmId> best;
  std::size_t best_load = 0;
  bool best_ready = false;
  for (const auto& vm : vms_) {
    if (vm.released()) continue;
    const bool ready = vm.is_ready(now_);
    const auto load = vm.outstanding();
    if (!best || (ready && !best_ready) || (ready == best_ready && load < best_load)) {
      best = vm.id;
      best_load = load;
      best_ready = ready;
    }
  }
  return best;
}

void Simulator::dispatch(const QueuedRequest& r) {
  auto target = pick_vm();
  if (!target) {
    backlog_.push_back(r);
    return;
  }
  VmInstance& vm = vms_[*target];
  vm.queue.push_back(r);
  if (vm.is_ready(now_) && !vm.in_service) start_next(vm);
}

void Simulator::start_next(VmInstance& vm) {
  if (vm.in_service || vm.queue.empty() || !vm.is_ready(now_)) return;
  vm.in_service = vm.queue.front();
  vm.queue.pop_front();
  vm.service_start = now_;
  vm.busy_until = now_ + service_time(vm.in_service->work, vm.capacity);
  push(vm.busy_until, EventKind::request_done, vm.id);
}

void Simulator::on_done(VmId id) {
  VmInstance& vm = vms_[id];
  const QueuedRequest r = *vm.in_service;
  vm.in_service.reset();

  if (!vm.busy_log.empty() && vm.busy_log.back().second == vm.service_start)
    vm.busy_log.back().second = now_;
  else
    vm.busy_log.emplace_back(vm.service_start, now_);

  bool success = false;
  if (r.index >= deadline_base_ && r.index - deadline_base_ < deadlines_.size() &&
      classify_request(now_ - r.arrival, config_.sla_response_limit) == RequestClass::success) {
    deadlines_[r.index - deadline_base_].succeeded = true;
    ++counters_.successes;
    success = true;
  }
  if (outcome_log_)
    outcome_log_->push_back(
        RequestOutcome{trace_->requests[r.index].id, r.arrival, vm.service_start, now_, id, success});

  start_next(vm);
  drain_backlog();
}

void Simulator::on_ready(VmId id) {
  start_next(vms_[id]);
  drain_backlog();
}

void Simulator::on_cycle_boundary(VmId id, double time) {
  VmInstance& vm = vms_[id];
  if (vm.released()) return;
  ++vm.cycles_charged;
  ++counters_.cycles_charged;
  push(time + config_.billing_cycle, EventKind::vm_cycle_boundary, id);
}

void Simulator::drain_backlog() {
  while (!backlog_.empty() && pick_vm()) {
    const QueuedRequest r = backlog_.front();
    backlog_.pop_front();
    dispatch(r);
  }
}

void Simulator::sweep_deadlines(double t) {
  while (!deadlines_.empty() && deadlines_.front().deadline <= t) {
    if (!deadlines_.front().succeeded) ++counters_.failures;
    deadlines_.pop_front();
    ++deadline_base_;
  }
}

void Simulator::prune_busy_logs() {
  const double keep_from = now_ - 2.0 * config_.decision_interval;
  for (auto& vm : vms_)
    while (!vm.busy_log.empty() && vm.busy_log.front().second < keep_from) vm.busy_log.pop_front();
}

VmId Simulator::launch_vm() { return add_vm(config_.spin_up); }

VmId Simulator::add_vm(double spin_up) {
  VmInstance vm;
  vm.id = vms_.size();
  vm.capacity = config_.vm_capacity;
  vm.requested_at = now_;
  vm.ready_at = now_ + spin_up;
  vm.billing_anchor = config_.billing_anchor == BillingAnchor::at_request ? vm.requested_at : vm.ready_at;
  vm.busy_until = vm.ready_at;
  vms_.push_back(std::move(vm));
  const VmInstance& added = vms_.back();
  push(added.ready_at, EventKind::vm_ready, added.id);
  push(added.billing_anchor, EventKind::vm_cycle_boundary, added.id);
  return added.id;
}

void Simulator::release_vm(VmId id) {
  if (id >= vms_.size()) throw SimulationError("cannot release unknown VM " + std::to_string(id));
  VmInstance& vm = vms_[id];
  if (vm.released()) throw SimulationError("VM " + std::to_string(id) + " is already released");
  vm.released_at = now_;
}

std::optional<VmId> Simulator::release_candidate() const {
  if (provisioned_vms() < 2) return std::nullopt;
  std::optional<VmId> idle_best;
  double idle_key = std::numeric_limits<double>::infinity();
  std::optional<VmId> busy_best;
  std::size_t busy_key = 0;
  for (const auto& vm : vms_) {
    if (vm.released()) continue;
    if (vm.idle()) {
      const double key = vm.time_to_charge(now_, config_.billing_cycle);
      if (!idle_best || key < idle_key) {
        idle_best = vm.id;
        idle_key = key;
      }
    } else if (!busy_best || vm.outstanding() < busy_key) {
      busy_best = vm.id;
      busy_key = vm.outstanding();
    }
  }
  return idle_best ? idle_best : busy_best;
}

Action Simulator::apply(Action action) {
  if (!is_valid(action))
    throw SimulationError("invalid action value " + std::to_string(static_cast<int>(action)));
  switch (action) {
    case Action::launch:
      launch_vm();
      return Action::launch;
    case Action::release:
      if (auto victim = release_candidate()) {
        release_vm(*victim);
        return Action::release;
      }
      return Action::maintain;
    case Action::maintain:
      return Action::maintain;
  }
  return Action::maintain;
}

ClusterObservation Simulator::observe(double window_start) const {
  ClusterObservation obs;
  obs.time = now_;
  std::size_t with_queue = 0;
  std::size_t near_cycle = 0;
  for (const auto& vm : vms_) {
    if (vm.released()) continue;
    if (!vm.is_ready(now_)) {
      ++obs.pending_vms;
      continue;
    }
    ++obs.ready_vms;
    if (!vm.queue.empty()) ++with_queue;
    else if (vm.time_to_charge(now_, config_.billing_cycle) <= config_.close_to_cycle) ++near_cycle;
    obs.per_vm_utilization.push_back(utilization(vm, window_start, now_, now_));
  }
  if (obs.ready_vms > 0) {
    obs.frac_vms_with_queue = static_cast<double>(with_queue) / static_cast<double>(obs.ready_vms);
    obs.frac_vms_idle_near_cycle = static_cast<double>(near_cycle) / static_cast<double>(obs.ready_vms);
  }
  return obs;
}

}  // namespace edebt
