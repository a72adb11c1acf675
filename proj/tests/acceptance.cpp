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

// Acceptance run: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "edebt/config.hpp"
#include "edebt/economics.hpp"
#include "edebt/experiment.hpp"
#include "edebt/policies.hpp"
#include "edebt/runner.hpp"
#include "edebt/sim.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

using namespace edebt;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentConfig base_config(PolicyKind policy, std::uint64_t seed) {
  auto c = load_config(std::string(EDEBT_SOURCE_DIR) + "/configs/debt-aware.cfg");
  c.policy = policy;
  c.seed = seed;
  return c;
}

// Both policies over seeds 1..kSeeds, spread over the available cores.
struct Sweep {
  std::vector<ExperimentReport> agent;
  std::vector<ExperimentReport> voting;
};

Sweep run_sweep() {
  Sweep s;
  s.agent.resize(kSeeds);
  s.voting.resize(kSeeds);
  std::vector<std::function<void()>> jobs;
  for (int i = 0; i < kSeeds; ++i) {
    jobs.emplace_back([&s, i] { s.agent[i] = run_experiment(base_config(PolicyKind::debt_aware, i + 1)); });
    jobs.emplace_back([&s, i] { s.voting[i] = run_experiment(base_config(PolicyKind::voting, i + 1)); });
  }
  std::mutex m;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t j;
      {
        std::lock_guard lock(m);
        if (next == jobs.size()) return;
        j = next++;
      }
      jobs[j]();
    }
  };
  const unsigned n = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return s;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome debt_non_positive(const Sweep& s) {
  std::size_t checked = 0, bad = 0;
  for (const auto* runs : {&s.agent, &s.voting})
    for (const auto& r : *runs)
      for (const auto& rec : r.result.records) {
        if (!rec.evaluated) continue;
        ++checked;
        double best = -1e300;
        for (const auto& u : rec.per_action_utilities)
          if (u) best = std::max(best, *u);
        const bool at_max = *rec.per_action_utilities[index_of(rec.action_taken)] == best;
        if (rec.debt > 1e-9 || (rec.debt == 0.0) != at_max) ++bad;
      }
  return {checked > 0 && bad == 0, std::to_string(checked) + " debts, " + std::to_string(bad) + " violations"};
}

Outcome utility_direction(const Sweep& s) {
  std::vector<double> ua, uv;
  int wins = 0;
  double slowest = 0;
  for (int i = 0; i < kSeeds; ++i) {
    ua.push_back(s.agent[i].summary.aggregate_utility);
    uv.push_back(s.voting[i].summary.aggregate_utility);
    wins += ua.back() > uv.back();
    slowest = std::max({slowest, s.agent[i].wall_clock_seconds, s.voting[i].wall_clock_seconds});
  }
  const double ma = mean(ua), mv = mean(uv);
  const bool ok = ma > mv && wins >= 7 && slowest < 60.0;
  return {ok, fmt("mean utility %.2f vs %.2f", ma, mv) + ", wins " + std::to_string(wins) + "/" +
                  std::to_string(kSeeds) + fmt(", slowest run %.1f s", slowest, 0)};
}

Outcome failure_direction(const Sweep& s) {
  std::vector<double> fa, fv;
  for (int i = 0; i < kSeeds; ++i) {
    fa.push_back(s.agent[i].summary.failed_fraction);
    fv.push_back(s.voting[i].summary.failed_fraction);
  }
  const double ma = mean(fa), mv = mean(fv);
  return {ma < mv, fmt("mean failed %.3f%% vs %.3f%%", 100 * ma, 100 * mv)};
}

Outcome utility_arithmetic() {
  SimConfig p;
  const std::vector<std::uint64_t> cycles = {3, 3};
  const double u = compute_utility(1000, 50, cycles, p).utility;
  return {std::abs(u - 1.06774) <= 1e-12, fmt("utility %.12f", u, 0)};
}

Outcome billing_semantics() {
  SimConfig c;
  auto charged = [&](double t) {
    Simulator sim(c, testing::make_trace({}));
    sim.launch_vm();
    sim.advance_to(t);
    sim.release_vm(0);
    sim.advance_to(3000);
    return sim.vm(0).cycles_charged;
  };
  const auto at420 = charged(420), at300 = charged(300);
  int mismatches = 0;
  for (int t = 1; t <= 1500; ++t) {
    const auto expected = static_cast<std::uint64_t>(std::ceil(t / 300.0));
    mismatches += charged(t) != expected;
  }
  return {at420 == 2 && at300 == 1 && mismatches == 0,
          "420 -> " + std::to_string(at420) + ", 300 -> " + std::to_string(at300) + ", sweep mismatches " +
              std::to_string(mismatches)};
}

Outcome q_learning() {
  const StateKey S[2] = {{Level::low, Level::low}, {Level::medium, Level::medium}};
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
  double err = 0;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a) err = std::max(err, std::abs(q.value(S[s], A[a]) - V[s][a]));

  QTable one;
  one.set(S[1], Action::maintain, 3, 0);
  one.set(S[1], Action::launch, -7, 0);
  q_update(one, S[0], Action::launch, 0.5, S[1], A, 1.0, gamma);
  const bool exact = one.value(S[0], Action::launch) == 0.5 + gamma * 3;
  return {err <= 1e-2 && exact, fmt("max |Q - Q*| %.2e, alpha=1 exact ", err, 0) + (exact ? "yes" : "no")};
}

Outcome oracle_equivalence() {
  Rng rng(2718);
  constexpr int n = 200;
  int matched = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = testing::random_micro_scenario(rng);
    const auto cf = counterfactual_ideal(testing::checkpoint_for(s), kAllActions, s.window_end);
    const auto o = testing::brute_force_window(s);
    bool same = cf.u_ideal == o.u_ideal && cf.ideal_action == o.ideal;
    for (Action a : kAllActions) same = same && *cf.utility_of(a) == o.utility[index_of(a)];
    matched += same;
  }
  return {matched == n, std::to_string(matched) + "/" + std::to_string(n) + " scenarios exact"};
}

std::uint64_t fnv1a(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "edebt_acceptance";
  fs::remove_all(root);
  bool identical = true;
  std::size_t files = 0;
  for (auto policy : {PolicyKind::debt_aware, PolicyKind::voting}) {
    const auto cfg = base_config(policy, 5);
    const auto a = root / (std::string(to_string(policy)) + "_a");
    const auto b = root / (std::string(to_string(policy)) + "_b");
    emit_csv(run_experiment(cfg), a.string());
    emit_csv(run_experiment(cfg), b.string());
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const auto other = b / entry.path().filename();
      identical = identical && fs::exists(other) && fnv1a(entry.path()) == fnv1a(other);
    }
  }
  fs::remove_all(root);

  auto cfg = base_config(PolicyKind::voting, 5);
  const auto with = run_experiment(cfg);
  cfg.record_debt = false;
  const auto without = run_experiment(cfg);
  bool same_series = with.result.windows.size() == without.result.windows.size();
  for (std::size_t i = 0; same_series && i < with.result.windows.size(); ++i)
    same_series = with.result.windows[i].provisioned_vms == without.result.windows[i].provisioned_vms &&
                  with.result.windows[i].ready_vms == without.result.windows[i].ready_vms;
  same_series = same_series && with.summary.aggregate_utility == without.summary.aggregate_utility;
  return {identical && same_series && files > 0,
          std::to_string(files) + " files hashed" + (identical ? " identical" : " DIFFER") +
              ", voting provisioning with/without debt " + (same_series ? "identical" : "DIFFERS")};
}

Outcome discretization() {
  auto obs = [](double q, double b) {
    ClusterObservation o;
    o.ready_vms = 100;
    o.frac_vms_with_queue = q;
    o.frac_vms_idle_near_cycle = b;
    return o;
  };
  std::vector<bool> seen(kStateCount, false);
  for (double q : {0.0, 0.2, 0.9})
    for (double b : {0.1, 0.5, 1.0}) seen[discretize_state(obs(q, b)).index()] = true;
  const bool all_states = std::all_of(seen.begin(), seen.end(), [](bool v) { return v; });
  const StateKey mm{Level::medium, Level::medium};
  const bool bounds = discretize_state(obs(0.15, 0.33)) == mm && discretize_state(obs(0.25, 0.66)) == mm;
  const bool pre = allowed_actions({Level::high, Level::low}) == std::vector<Action>{Action::launch} &&
                   allowed_actions({Level::low, Level::high}) == std::vector<Action>{Action::release};
  return {all_states && bounds && pre, std::string("9 states ") + (all_states ? "reached" : "MISSING") +
                                           ", boundaries " + (bounds ? "medium" : "WRONG") + ", preconditions " +
                                           (pre ? "ok" : "WRONG")};
}

Outcome learning_trend(const Sweep& s) {
  std::vector<double> first, last;
  for (const auto& r : s.agent) {
    const double h = r.result.horizon;
    std::vector<double> a, b;
    for (const auto& rec : r.result.records) {
      if (!rec.evaluated) continue;
      if (rec.time < h / 4) a.push_back(rec.debt);
      if (rec.time >= 3 * h / 4) b.push_back(rec.debt);
    }
    first.push_back(mean(a));
    last.push_back(mean(b));
  }
  const double mf = mean(first), ml = mean(last);
  return {ml >= mf, fmt("mean debt first quarter %.5f, final quarter %.5f", mf, ml)};
}

}  // namespace

int main() {
  const Sweep sweep = run_sweep();
  const std::vector<std::pair<const char*, Outcome>> rows = {
      {"debt non-positivity", debt_non_positive(sweep)},
      {"utility direction", utility_direction(sweep)},
      {"failure direction", failure_direction(sweep)},
      {"utility arithmetic", utility_arithmetic()},
      {"billing semantics", billing_semantics()},
      {"q-learning correctness", q_learning()},
      {"counterfactual oracle", oracle_equivalence()},
      {"determinism", determinism()},
      {"discretization and preconditions", discretization()},
      {"learning trend", learning_trend(sweep)},
  };
  int failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [name, o] = rows[i];
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, name, o.detail.c_str());
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
