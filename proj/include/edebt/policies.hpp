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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edebt/action.hpp"
#include "edebt/rng.hpp"
#include "edebt/sim.hpp"

namespace edebt {

enum class Level { low = 0, medium = 1, high = 2 };

std::string_view to_string(Level l) noexcept;
std::optional<Level> level_from_string(std::string_view s) noexcept;

/// Discretized agent state: share of VMs with queued requests, and share of
/// VMs close to their next billing cycle without queued requests.
struct StateKey {
  Level queued = Level::low;
  Level billing_idle = Level::low;

  std::size_t index() const noexcept {
    return static_cast<std::size_t>(queued) * 3 + static_cast<std::size_t>(billing_idle);
  }
  static StateKey from_index(std::size_t i) noexcept {
    return {static_cast<Level>(i / 3), static_cast<Level>(i % 3)};
  }
  bool operator==(const StateKey&) const = default;
};

inline constexpr std::size_t kStateCount = 9;

/// Level boundaries are exclusive: a value equal to a bound is medium.
struct StateThresholds {
  double queued_low = 0.15;
  double queued_high = 0.25;
  double billing_low = 0.33;
  double billing_high = 0.66;
};

StateKey discretize_state(const ClusterObservation& obs, const StateThresholds& thresholds = {});

/// Action preconditions; never empty.
std::vector<Action> allowed_actions(StateKey state);

/// Tabular action-utility estimates; absent entries read as 0.
class QTable {
 public:
  double value(StateKey s, Action a) const { return entries_[slot(s, a)].value; }
  std::uint64_t visits(StateKey s, Action a) const { return entries_[slot(s, a)].visits; }
  void set(StateKey s, Action a, double value, std::uint64_t visits);

  /// max over `actions` of Q(s, .); 0 when `actions` is empty.
  double max_value(StateKey s, std::span<const Action> actions) const;

  /// `state_queued,state_billing,action,q,visits` rows after a header.
  void write_csv(std::ostream& out) const;
  static QTable read_csv(std::istream& in);

  bool operator==(const QTable&) const = default;

 private:
  struct Entry {
    double value = 0.0;
    std::uint64_t visits = 0;
    bool operator==(const Entry&) const = default;
  };
  static std::size_t slot(StateKey s, Action a) noexcept { return s.index() * 3 + index_of(a); }
  std::array<Entry, kStateCount * 3> entries_{};
};

enum class AlphaDecay {
  linear,          ///< alpha_initial - step * visits
  multiplicative,  ///< alpha_initial * step^visits
};

struct LearningParams {
  double alpha_initial = 1.0;
  double alpha_decay_step = 0.1;
  double alpha_min = 0.1;
  double gamma = 0.99;
  double epsilon = 0.1;
  AlphaDecay decay = AlphaDecay::linear;

  void validate() const;  // throws ConfigError
};

/// Learning rate for a (state, action) pair seen `visit_count` times.
double alpha_for(std::uint64_t visit_count, const LearningParams& params);

/// Epsilon-greedy over `allowed`: uniform draw with probability epsilon,
/// else the argmax of Q with ties going to maintain, then launch, then release.
Action select_action(const QTable& q, StateKey state, std::span<const Action> allowed, double epsilon,
                     Rng& rng);

/// Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_{a' in allowed_next} Q(s',a'))
/// and one more visit for (s,a).
void q_update(QTable& q, StateKey s, Action a, double reward, StateKey s_next,
              std::span<const Action> allowed_next, double alpha, double gamma);

struct VotingParams {
  double lower_cpu = 0.25;
  double upper_cpu = 0.95;

  void validate() const;  // throws ConfigError
};

/// One VM's vote; thresholds are strict.
Action vm_vote(double utilization, const VotingParams& params);

/// Relative majority; a tie for the top count yields maintain.
Action vote_decision(std::span<const Action> votes);

/// When a policy's adaptations get their debt evaluated.
enum class DebtMode {
  retrospective,  ///< window runs until the next decision; computed after the fact
  proactive,      ///< window is one decision interval plus one billing cycle; fed back as reward
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action decide(const ClusterObservation& obs) = 0;
  /// Called once per earlier decision when its reward is known.
  virtual void observe_reward(double reward, const ClusterObservation& next) = 0;
  virtual DebtMode debt_mode() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// Threshold voting baseline; each ready VM votes from its CPU utilization.
class VotingPolicy final : public Policy {
 public:
  explicit VotingPolicy(VotingParams params = {});

  Action decide(const ClusterObservation& obs) override;
  void observe_reward(double, const ClusterObservation&) override {}
  DebtMode debt_mode() const noexcept override { return DebtMode::retrospective; }
  std::string_view name() const noexcept override { return "voting"; }

 private:
  VotingParams params_;
};

/// Tabular Q-learning agent rewarded with the elasticity debt of each decision.
class DebtAwarePolicy final : public Policy {
 public:
  DebtAwarePolicy(LearningParams params, std::uint64_t seed, StateThresholds thresholds = {},
                  QTable initial = {});

  Action decide(const ClusterObservation& obs) override;
  /// Throws SimulationError when no decision is awaiting its reward.
  void observe_reward(double reward, const ClusterObservation& next) override;
  DebtMode debt_mode() const noexcept override { return DebtMode::proactive; }
  std::string_view name() const noexcept override { return "debt-aware"; }

  const QTable& q_table() const noexcept { return q_; }
  bool awaiting_reward() const noexcept { return pending_.has_value(); }

 private:
  LearningParams params_;
  StateThresholds thresholds_;
  QTable q_;
  Rng rng_;
  std::optional<std::pair<StateKey, Action>> pending_;
};

}  // namespace edebt
