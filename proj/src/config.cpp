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

#include "edebt/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "edebt/error.hpp"
#include "text_util.hpp"

namespace edebt {

std::string_view to_string(PolicyKind p) noexcept {
  return p == PolicyKind::debt_aware ? "debt-aware" : "voting";
}

std::optional<PolicyKind> policy_from_string(std::string_view s) noexcept {
  if (s == "debt-aware" || s == "debt_aware") return PolicyKind::debt_aware;
  if (s == "voting") return PolicyKind::voting;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  sim.validate();
  if (profile.has_value() == trace_path.has_value())
    throw ConfigError("exactly one workload source (profile or trace) is required");
  if (profile) {
    try {
      profile->validate();
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("profile: ") + e.what());
    }
  }
  learning.validate();
  voting.validate();
  if (!(thresholds.queued_low <= thresholds.queued_high) ||
      !(thresholds.billing_low <= thresholds.billing_high))
    throw ConfigError("state thresholds need low <= high");
  if (horizon && (!(*horizon > 0.0) || !std::isfinite(*horizon)))
    throw ConfigError("horizon must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

namespace {

std::string resolve(const std::string& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  ExperimentConfig cfg;
  std::optional<std::string> profile_path;
  RateProfile inline_profile;
  bool has_inline = false;

  using Setter = std::function<void(std::size_t, const std::string&)>;
  auto num = [](double& field) -> Setter {
    return [&field](std::size_t line, const std::string& v) { field = detail::require_double(line, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"spin_up", num(cfg.sim.spin_up)},
      {"cool_down", num(cfg.sim.cool_down)},
      {"billing_cycle", num(cfg.sim.billing_cycle)},
      {"decision_interval", num(cfg.sim.decision_interval)},
      {"vm_capacity", num(cfg.sim.vm_capacity)},
      {"work_per_request", num(cfg.sim.work_per_request)},
      {"sla_response_limit", num(cfg.sim.sla_response_limit)},
      {"price_per_request", num(cfg.sim.price_per_request)},
      {"penalty_per_request", num(cfg.sim.penalty_per_request)},
      {"vm_cost_per_cycle", num(cfg.sim.vm_cost_per_cycle)},
      {"close_to_cycle", num(cfg.sim.close_to_cycle)},
      {"sla_target", num(cfg.sim.sla_target)},
      {"initial_vms",
       [&](std::size_t l, const std::string& v) { cfg.sim.initial_vms = static_cast<int>(detail::require_int(l, v)); }},
      {"billing_anchor",
       [&](std::size_t l, const std::string& v) {
         if (v == "at_request") cfg.sim.billing_anchor = BillingAnchor::at_request;
         else if (v == "at_ready") cfg.sim.billing_anchor = BillingAnchor::at_ready;
         else throw ParseError(l, "billing_anchor must be at_request or at_ready");
       }},
      {"sla_mode",
       [&](std::size_t l, const std::string& v) {
         if (v == "per_request") cfg.sim.sla_mode = SlaMode::per_request;
         else if (v == "floor") cfg.sim.sla_mode = SlaMode::floor;
         else throw ParseError(l, "sla_mode must be per_request or floor");
       }},
      {"policy",
       [&](std::size_t l, const std::string& v) {
         auto p = policy_from_string(v);
         if (!p) throw ParseError(l, "policy must be debt-aware or voting");
         cfg.policy = *p;
       }},
      {"seed",
       [&](std::size_t l, const std::string& v) {
         auto s = detail::require_int(l, v);
         if (s < 0) throw ParseError(l, "seed must be non-negative");
         cfg.seed = static_cast<std::uint64_t>(s);
       }},
      {"horizon", [&](std::size_t l, const std::string& v) { cfg.horizon = detail::require_double(l, v); }},
      {"output_dir", [&](std::size_t, const std::string& v) { cfg.output_dir = v; }},
      {"profile", [&](std::size_t, const std::string& v) { profile_path = resolve(base_dir, v); }},
      {"trace", [&](std::size_t, const std::string& v) { cfg.trace_path = resolve(base_dir, v); }},
      {"qtable_in", [&](std::size_t, const std::string& v) { cfg.qtable_in = resolve(base_dir, v); }},
      {"record_debt",
       [&](std::size_t l, const std::string& v) {
         if (v == "true" || v == "1") cfg.record_debt = true;
         else if (v == "false" || v == "0") cfg.record_debt = false;
         else throw ParseError(l, "record_debt must be true or false");
       }},
      {"alpha_initial", num(cfg.learning.alpha_initial)},
      {"alpha_decay_step", num(cfg.learning.alpha_decay_step)},
      {"alpha_min", num(cfg.learning.alpha_min)},
      {"gamma", num(cfg.learning.gamma)},
      {"epsilon", num(cfg.learning.epsilon)},
      {"alpha_decay",
       [&](std::size_t l, const std::string& v) {
         if (v == "linear") cfg.learning.decay = AlphaDecay::linear;
         else if (v == "multiplicative") cfg.learning.decay = AlphaDecay::multiplicative;
         else throw ParseError(l, "alpha_decay must be linear or multiplicative");
       }},
      {"lower_cpu", num(cfg.voting.lower_cpu)},
      {"upper_cpu", num(cfg.voting.upper_cpu)},
      {"queued_low", num(cfg.thresholds.queued_low)},
      {"queued_high", num(cfg.thresholds.queued_high)},
      {"billing_low", num(cfg.thresholds.billing_low)},
      {"billing_high", num(cfg.thresholds.billing_high)},
      // Inline workload profile.
      {"mode",
       [&](std::size_t l, const std::string& v) {
         has_inline = true;
         if (v == "deterministic") inline_profile.arrival_mode = ArrivalMode::deterministic;
         else if (v == "poisson") inline_profile.arrival_mode = ArrivalMode::poisson;
         else throw ParseError(l, "mode must be deterministic or poisson");
       }},
      {"duration",
       [&](std::size_t l, const std::string& v) {
         has_inline = true;
         inline_profile.duration = detail::require_double(l, v);
       }},
      {"work_mi",
       [&](std::size_t l, const std::string& v) {
         has_inline = true;
         inline_profile.work_per_request = detail::require_double(l, v);
       }},
      {"segment",
       [&](std::size_t l, const std::string& v) {
         has_inline = true;
         auto f = detail::split_ws(v);
         if (f.size() != 5) throw ParseError(l, "segment needs 5 fields: start end base_rate amplitude period");
         inline_profile.segments.push_back({detail::require_double(l, f[0]), detail::require_double(l, f[1]),
                                            detail::require_double(l, f[2]), detail::require_double(l, f[3]),
                                            detail::require_double(l, f[4])});
       }},
  };

  for (const auto& kv : detail::read_key_values(in)) {
    auto it = setters.find(kv.key);
    if (it == setters.end()) throw ParseError(kv.line, "unknown config key '" + kv.key + "'");
    it->second(kv.line, kv.value);
  }

  if (profile_path && has_inline) throw ConfigError("config has both a profile file and inline segments");
  if (profile_path) {
    try {
      cfg.profile = load_profile(*profile_path);
    } catch (const Error& e) {
      throw ConfigError(std::string("profile: ") + e.what());
    }
  } else if (has_inline) {
    cfg.profile = inline_profile;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  const auto base = std::filesystem::path(path).parent_path().string();
  try {
    return parse_config(in, base);
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace edebt
