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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "edebt/error.hpp"
#include "edebt/policies.hpp"

using namespace edebt;

namespace {

ClusterObservation obs_with(double queued, double idle) {
  ClusterObservation o;
  o.ready_vms = 100;
  o.frac_vms_with_queue = queued;
  o.frac_vms_idle_near_cycle = idle;
  return o;
}

constexpr StateKey LL{Level::low, Level::low};
constexpr StateKey MM{Level::medium, Level::medium};

const std::array<Action, 3> all = {Action::maintain, Action::launch, Action::release};

}  // namespace

TEST_CASE("discretize_state examples and boundaries") {
  CHECK(discretize_state(obs_with(0.10, 0.50)) == StateKey{Level::low, Level::medium});
  CHECK(discretize_state(obs_with(0.15, 0.33)) == MM);
  CHECK(discretize_state(obs_with(0.25, 0.66)) == MM);
  CHECK(discretize_state(obs_with(0.30, 0.70)) == StateKey{Level::high, Level::high});
}

TEST_CASE("every state is reachable from constructed observations") {
  const double q[] = {0.0, 0.2, 0.9};
  const double b[] = {0.1, 0.5, 1.0};
  std::vector<bool> seen(kStateCount, false);
  for (double x : q)
    for (double y : b) seen[discretize_state(obs_with(x, y)).index()] = true;
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool v) { return v; }));
  for (std::size_t i = 0; i < kStateCount; ++i) CHECK(StateKey::from_index(i).index() == i);
}

TEST_CASE("preconditions") {
  using V = std::vector<Action>;
  CHECK(allowed_actions({Level::high, Level::low}) == V{Action::launch});
  CHECK(allowed_actions({Level::high, Level::medium}) == V{Action::launch});
  CHECK(allowed_actions({Level::low, Level::high}) == V{Action::release});
  CHECK(allowed_actions({Level::medium, Level::high}) == V{Action::release});
  CHECK(allowed_actions(MM).size() == 3);
  CHECK(allowed_actions({Level::high, Level::high}).size() == 3);
  for (std::size_t i = 0; i < kStateCount; ++i) CHECK_FALSE(allowed_actions(StateKey::from_index(i)).empty());
}

TEST_CASE("select_action: greedy argmax and tie order") {
  QTable q;
  q.set(MM, Action::launch, -1, 0);
  q.set(MM, Action::maintain, -0.5, 0);
  q.set(MM, Action::release, -2, 0);
  Rng rng(1);
  CHECK(select_action(q, MM, all, 0.0, rng) == Action::maintain);

  QTable flat;
  CHECK(select_action(flat, MM, all, 0.0, rng) == Action::maintain);
  const std::array<Action, 2> lr = {Action::launch, Action::release};
  CHECK(select_action(flat, MM, lr, 0.0, rng) == Action::launch);
  q.set(MM, Action::release, 5, 0);
  const std::array<Action, 1> only = {Action::launch};
  CHECK(select_action(q, MM, only, 0.0, rng) == Action::launch);  // precondition beats Q
}

TEST_CASE("select_action: full exploration is reproducible and uniform") {
  QTable q;
  Rng a(42), b(42);
  std::map<Action, int> counts;
  for (int i = 0; i < 3000; ++i) {
    const Action x = select_action(q, MM, all, 1.0, a);
    CHECK(x == select_action(q, MM, all, 1.0, b));
    ++counts[x];
  }
  for (Action x : all) CHECK(counts[x] == doctest::Approx(1000).epsilon(0.1));
}

TEST_CASE("q_update examples") {
  const std::array<Action, 3> next = all;
  QTable q;
  q.set(LL, Action::launch, 10, 0);
  q_update(q, MM, Action::maintain, -2, LL, next, 0.5, 0.99);
  CHECK(q.value(MM, Action::maintain) == doctest::Approx(3.95).epsilon(1e-12));
  CHECK(q.visits(MM, Action::maintain) == 1);

  QTable full;
  full.set(LL, Action::release, 4, 0);
  full.set(MM, Action::launch, 123, 0);
  q_update(full, MM, Action::launch, -1.5, LL, next, 1.0, 0.9);
  CHECK(full.value(MM, Action::launch) == -1.5 + 0.9 * 4);

  QTable decay;
  decay.set(MM, Action::release, 8, 3);
  q_update(decay, MM, Action::release, 0, LL, next, 0.25, 0.0);
  CHECK(decay.value(MM, Action::release) == 6.0);
  CHECK(decay.visits(MM, Action::release) == 4);
}

TEST_CASE("q_update maximizes only over the allowed next actions") {
  QTable q;
  q.set(LL, Action::release, 50, 0);
  q.set(LL, Action::launch, 2, 0);
  const std::array<Action, 1> launch_only = {Action::launch};
  q_update(q, MM, Action::maintain, 0, LL, launch_only, 1.0, 0.5);
  CHECK(q.value(MM, Action::maintain) == 1.0);
}

TEST_CASE("alpha schedule") {
  LearningParams p;
  CHECK(alpha_for(0, p) == 1.0);
  CHECK(alpha_for(5, p) == doctest::Approx(0.5));
  CHECK(alpha_for(50, p) == 0.1);
  p.decay = AlphaDecay::multiplicative;
  CHECK(alpha_for(0, p) == 1.0);
  CHECK(alpha_for(1, p) == doctest::Approx(0.1));
  CHECK(alpha_for(3, p) == 0.1);
}

TEST_CASE("parameter validation") {
  LearningParams p;
  CHECK_NOTHROW(p.validate());
  p.epsilon = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.gamma = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.alpha_min = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  VotingParams v;
  CHECK_NOTHROW(v.validate());
  v.lower_cpu = 0.96;
  CHECK_THROWS_AS(v.validate(), ConfigError);
}

TEST_CASE("2-state deterministic MDP matches value iteration") {
  // States LL and MM; actions maintain and launch.
  const std::array<StateKey, 2> S = {LL, MM};
  const std::array<Action, 2> A = {Action::maintain, Action::launch};
  const double R[2][2] = {{-1.0, 0.5}, {2.0, -0.25}};
  const int T[2][2] = {{0, 1}, {0, 1}};
  const double gamma = 0.9;

  double V[2][2] = {};
  for (;;) {
    double next[2][2], delta = 0;
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const int n = T[s][a];
        next[s][a] = R[s][a] + gamma * std::max(V[n][0], V[n][1]);
        delta = std::max(delta, std::abs(next[s][a] - V[s][a]));
      }
    std::copy(&next[0][0], &next[0][0] + 4, &V[0][0]);
    if (delta < 1e-10) break;
  }

  QTable q;
  for (int sweep = 0; sweep < 3000; ++sweep)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) q_update(q, S[s], A[a], R[s][a], S[T[s][a]], A, 0.1, gamma);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a) CHECK(std::abs(q.value(S[s], A[a]) - V[s][a]) <= 1e-2);

  // alpha = 1: one update lands exactly on r + gamma * max.
  QTable one;
  one.set(MM, Action::maintain, 3, 0);
  one.set(MM, Action::launch, -7, 0);
  q_update(one, LL, Action::launch, R[0][1], MM, A, 1.0, gamma);
  CHECK(one.value(LL, Action::launch) == R[0][1] + gamma * 3);
}

TEST_CASE("property: Q stays within max|r| / (1 - gamma)") {
  Rng rng(9);
  QTable q;
  const double gamma = 0.9;
  for (int i = 0; i < 20000; ++i) {
    const auto s = StateKey::from_index(rng.index(kStateCount));
    const auto n = StateKey::from_index(rng.index(kStateCount));
    const auto a = all[rng.index(3)];
    const double r = 2 * rng.uniform01() - 1;
    q_update(q, s, a, r, n, allowed_actions(n), 0.05 + 0.95 * rng.uniform01(), gamma);
  }
  for (std::size_t i = 0; i < kStateCount; ++i)
    for (Action a : all) CHECK(std::abs(q.value(StateKey::from_index(i), a)) <= 1.0 / (1 - gamma) + 1e-12);
}

TEST_CASE("QTable CSV round trip") {
  QTable q;
  Rng rng(2);
  for (std::size_t i = 0; i < kStateCount; ++i)
    for (Action a : all) q.set(StateKey::from_index(i), a, rng.uniform01() - 0.7, rng.index(100));
  std::stringstream buf;
  q.write_csv(buf);
  const QTable back = QTable::read_csv(buf);
  for (std::size_t i = 0; i < kStateCount; ++i)
    for (Action a : all) {
      CHECK(back.value(StateKey::from_index(i), a) == q.value(StateKey::from_index(i), a));
      CHECK(back.visits(StateKey::from_index(i), a) == q.visits(StateKey::from_index(i), a));
    }
  std::istringstream bad("state_queued,state_billing,action,q,visits\nlow,low,jump,0,0\n");
  CHECK_THROWS_AS(QTable::read_csv(bad), ParseError);
}

TEST_CASE("votes") {
  VotingParams p;
  CHECK(vm_vote(0.96, p) == Action::launch);
  CHECK(vm_vote(0.20, p) == Action::release);
  CHECK(vm_vote(0.25, p) == Action::maintain);
  CHECK(vm_vote(0.95, p) == Action::maintain);

  using V = std::vector<Action>;
  CHECK(vote_decision(V{Action::launch, Action::launch, Action::launch, Action::maintain, Action::maintain}) ==
        Action::launch);
  CHECK(vote_decision(V{Action::launch, Action::launch, Action::release, Action::release, Action::maintain}) ==
        Action::maintain);
  CHECK(vote_decision(V(5, Action::maintain)) == Action::maintain);
  CHECK(vote_decision(V{}) == Action::maintain);
}

TEST_CASE("property: vote_decision is permutation invariant") {
  Rng rng(12);
  for (int round = 0; round < 200; ++round) {
    std::vector<Action> votes;
    const auto n = 1 + rng.index(12);
    for (std::size_t i = 0; i < n; ++i) votes.push_back(all[rng.index(3)]);
    const Action expected = vote_decision(votes);
    for (int k = 0; k < 10; ++k) {
      for (std::size_t i = votes.size() - 1; i > 0; --i) std::swap(votes[i], votes[rng.index(i + 1)]);
      CHECK(vote_decision(votes) == expected);
    }
  }
}

TEST_CASE("voting policy reads only utilization") {
  VotingPolicy v;
  auto o = obs_with(0.9, 0.0);  // queue share is ignored
  o.per_vm_utilization = {0.1, 0.1, 0.5};
  CHECK(v.decide(o) == Action::release);
  o.per_vm_utilization = {0.99, 0.98, 0.5};
  CHECK(v.decide(o) == Action::launch);
  o.per_vm_utilization = {};
  CHECK(v.decide(o) == Action::maintain);
  CHECK(v.debt_mode() == DebtMode::retrospective);
}

TEST_CASE("debt-aware agent: hand-traced two windows") {
  LearningParams p;
  p.epsilon = 0;
  DebtAwarePolicy agent(p, 1);
  CHECK_THROWS_AS(agent.observe_reward(-1, obs_with(0, 0)), SimulationError);

  auto mm = obs_with(0.2, 0.5);
  auto ll = obs_with(0.0, 0.0);
  CHECK(agent.decide(mm) == Action::maintain);  // zero Q, tie rule
  CHECK(agent.awaiting_reward());
  agent.observe_reward(-0.5, ll);
  // alpha(0) = 1: Q = -0.5 + 0.99 * max_LL(0) = -0.5
  CHECK(agent.q_table().value(MM, Action::maintain) == -0.5);

  CHECK(agent.decide(ll) == Action::maintain);
  agent.observe_reward(-0.2, mm);
  // max over MM is 0 (launch, release untouched)
  CHECK(agent.q_table().value(LL, Action::maintain) == -0.2);

  CHECK(agent.decide(mm) == Action::launch);
  agent.observe_reward(-1.0, ll);
  // max over LL = max(-0.2, 0, 0) = 0
  CHECK(agent.q_table().value(MM, Action::launch) == -1.0);

  CHECK(agent.decide(mm) == Action::release);
  agent.observe_reward(0.0, mm);
  // Q = 0 + 0.99 * max(-0.5, -1, 0) = 0
  CHECK(agent.q_table().value(MM, Action::release) == 0.0);

  CHECK(agent.decide(mm) == Action::release);
  agent.observe_reward(-0.4, ll);
  // second visit: alpha = 0.9, Q = 0.1 * 0 + 0.9 * (-0.4 + 0.99 * 0)
  CHECK(agent.q_table().value(MM, Action::release) == doctest::Approx(-0.36).epsilon(1e-12));
  CHECK(agent.q_table().visits(MM, Action::release) == 2);
}

TEST_CASE("debt-aware agent honours preconditions and stays in the allowed set") {
  LearningParams p;
  p.epsilon = 0.5;
  DebtAwarePolicy agent(p, 3);
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    auto o = obs_with(rng.uniform01(), rng.uniform01());
    const auto s = discretize_state(o);
    const Action a = agent.decide(o);
    const auto allowed = allowed_actions(s);
    CHECK(std::find(allowed.begin(), allowed.end(), a) != allowed.end());
    agent.observe_reward(-rng.uniform01(), obs_with(rng.uniform01(), rng.uniform01()));
  }
  LearningParams greedy;
  greedy.epsilon = 0;
  QTable bad_launch;
  bad_launch.set({Level::high, Level::low}, Action::launch, -100, 10);
  DebtAwarePolicy forced(greedy, 1, {}, bad_launch);
  CHECK(forced.decide(obs_with(0.9, 0.0)) == Action::launch);
}

TEST_CASE("greedy agent with a frozen table is deterministic") {
  LearningParams p;
  p.epsilon = 0;
  QTable q;
  Rng rng(5);
  for (std::size_t i = 0; i < kStateCount; ++i)
    for (Action a : all) q.set(StateKey::from_index(i), a, -rng.uniform01(), 0);
  DebtAwarePolicy a(p, 1, {}, q), b(p, 999, {}, q);
  for (int i = 0; i < 100; ++i) {
    auto o = obs_with(rng.uniform01(), rng.uniform01());
    CHECK(a.decide(o) == b.decide(o));
    a = DebtAwarePolicy(p, 1, {}, q);
    b = DebtAwarePolicy(p, 999, {}, q);
  }
}
