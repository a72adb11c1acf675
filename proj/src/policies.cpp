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

#include "edebt/policies.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "edebt/error.hpp"
#include "text_util.hpp"

namespace edebt {

std::string_view to_string(Level l) noexcept {
  switch (l) {
    case Level::low: return "low";
    case Level::medium: return "medium";
    case Level::high: return "high";
  }
  return "invalid";
}

std::optional<Level> level_from_string(std::string_view s) noexcept {
  for (Level l : {Level::low, Level::medium, Level::high})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

namespace {

Level bucket(double frac, double low, double high) {
  if (frac < low) return Level::low;
  if (frac > high) return Level::high;
  return Level::medium;
}

}  // namespace

StateKey discretize_state(const ClusterObservation& obs, const StateThresholds& t) {
  return {bucket(obs.frac_vms_with_queue, t.queued_low, t.queued_high),
          bucket(obs.frac_vms_idle_near_cycle, t.billing_low, t.billing_high)};
}

std::vector<Action> allowed_actions(StateKey state) {
  const bool queued_high = state.queued == Level::high;
  const bool idle_high = state.billing_idle == Level::high;
  if (queued_high && !idle_high) return {Action::launch};
  if (idle_high && !queued_high) return {Action::release};
  return {kAllActions.begin(), kAllActions.end()};
}

void QTable::set(StateKey s, Action a, double value, std::uint64_t visits) {
  entries_[slot(s, a)] = Entry{value, visits};
}

double QTable::max_value(StateKey s, std::span<const Action> actions) const {
  if (actions.empty()) return 0.0;
  double best = value(s, actions.front());
  for (Action a : actions.subspan(1)) best = std::max(best, value(s, a));
  return best;
}

void QTable::write_csv(std::ostream& out) const {
  out << "state_queued,state_billing,action,q,visits\n";
  for (std::size_t i = 0; i < kStateCount; ++i) {
    const StateKey s = StateKey::from_index(i);
    for (Action a : kAllActions) {
      out << to_string(s.queued) << ',' << to_string(s.billing_idle) << ',' << to_string(a) << ','
          << detail::format_double(value(s, a)) << ',' << visits(s, a) << '\n';
    }
  }
}

QTable QTable::read_csv(std::istream& in) {
  QTable q;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || (lineno == 1 && body.starts_with("state_queued"))) continue;
    auto f = detail::split(body, ',');
    if (f.size() != 5) throw ParseError(lineno, "expected 5 comma-separated fields");
    auto queued = level_from_string(detail::trim(f[0]));
    auto billing = level_from_string(detail::trim(f[1]));
    auto action = action_from_string(detail::trim(f[2]));
    if (!queued || !billing) throw ParseError(lineno, "unknown state level");
    if (!action) throw ParseError(lineno, "unknown action");
    const double value = detail::require_double(lineno, f[3]);
    const auto visits = detail::require_int(lineno, f[4]);
    if (visits < 0) throw ParseError(lineno, "negative visit count");
    q.set({*queued, *billing}, *action, value, static_cast<std::uint64_t>(visits));
  }
  return q;
}

void LearningParams::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  unit(epsilon, "epsilon");
  unit(gamma, "gamma");
  unit(alpha_decay_step, "alpha_decay_step");
  if (!(alpha_min > 0.0) || alpha_min > 1.0) throw ConfigError("alpha_min must lie in (0, 1]");
  if (!(alpha_initial > 0.0) || alpha_initial > 1.0) throw ConfigError("alpha_initial must lie in (0, 1]");
  if (alpha_min > alpha_initial) throw ConfigError("alpha_min must not exceed alpha_initial");
}

double alpha_for(std::uint64_t visit_count, const LearningParams& p) {
  const auto n = static_cast<double>(visit_count);
  const double raw = p.decay == AlphaDecay::linear ? p.alpha_initial - p.alpha_decay_step * n
                                                   : p.alpha_initial * std::pow(p.alpha_decay_step, n);
  return std::max(p.alpha_min, raw);
}

Action select_action(const QTable& q, StateKey state, std::span<const Action> allowed, double epsilon,
                     Rng& rng) {
  if (allowed.empty()) throw SimulationError("no allowed actions to select from");
  // One draw per decision regardless of epsilon keeps the stream aligned.
  if (rng.uniform01() < epsilon) return allowed[rng.index(allowed.size())];

  std::optional<Action> best;
  for (Action a : kAllActions) {
    if (std::find(allowed.begin(), allowed.end(), a) == allowed.end()) continue;
    if (!best || q.value(state, a) > q.value(state, *best)) best = a;
  }
  return *best;
}

void q_update(QTable& q, StateKey s, Action a, double reward, StateKey s_next,
              std::span<const Action> allowed_next, double alpha, double gamma) {
  const double target = reward + gamma * q.max_value(s_next, allowed_next);
  const double updated = (1.0 - alpha) * q.value(s, a) + alpha * target;
  q.set(s, a, updated, q.visits(s, a) + 1);
}

void VotingParams::validate() const {
  if (!(lower_cpu >= 0.0) || !(upper_cpu <= 1.0) || !(lower_cpu < upper_cpu))
    throw ConfigError("voting thresholds need 0 <= lower_cpu < upper_cpu <= 1");
}

Action vm_vote(double utilization, const VotingParams& params) {
  if (utilization > params.upper_cpu) return Action::launch;
  if (utilization < params.lower_cpu) return Action::release;
  return Action::maintain;
}

Action vote_decision(std::span<const Action> votes) {
  std::array<std::size_t, 3> counts{};
  for (Action v : votes) ++counts[index_of(v)];
  const auto top = *std::max_element(counts.begin(), counts.end());
  if (top == 0 || std::count(counts.begin(), counts.end(), top) > 1) return Action::maintain;
  return static_cast<Action>(std::find(counts.begin(), counts.end(), top) - counts.begin());
}

VotingPolicy::VotingPolicy(VotingParams params) : params_(params) { params_.validate(); }

Action VotingPolicy::decide(const ClusterObservation& obs) {
  std::vector<Action> votes;
  votes.reserve(obs.per_vm_utilization.size());
  for (double u : obs.per_vm_utilization) votes.push_back(vm_vote(u, params_));
  return vote_decision(votes);
}

DebtAwarePolicy::DebtAwarePolicy(LearningParams params, std::uint64_t seed, StateThresholds thresholds,
                                 QTable initial)
    : params_(params), thresholds_(thresholds), q_(std::move(initial)), rng_(seed) {
  params_.validate();
}

Action DebtAwarePolicy::decide(const ClusterObservation& obs) {
  const StateKey s = discretize_state(obs, thresholds_);
  const auto allowed = allowed_actions(s);
  const Action a = select_action(q_, s, allowed, params_.epsilon, rng_);
  pending_ = std::make_pair(s, a);
  return a;
}

void DebtAwarePolicy::observe_reward(double reward, const ClusterObservation& next) {
  if (!pending_) throw SimulationError("reward delivered with no decision awaiting it");
  const auto [s, a] = *pending_;
  const StateKey s_next = discretize_state(next, thresholds_);
  const auto allowed_next = allowed_actions(s_next);
  q_update(q_, s, a, reward, s_next, allowed_next, alpha_for(q_.visits(s, a), params_), params_.gamma);
  pending_.reset();
}

}  // namespace edebt
