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

#include "edebt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "edebt/error.hpp"
#include "edebt/rng.hpp"
#include "text_util.hpp"

namespace edebt {

SeedStreams derive_seeds(std::uint64_t seed) noexcept {
  return {splitmix64(seed ^ 0x776f726b6c6f6164ULL), splitmix64(seed ^ 0x6578706c6f726521ULL)};
}

PreparedWorkload prepare_workload(const ExperimentConfig& config) {
  PreparedWorkload out;
  if (config.profile) {
    const auto& p = *config.profile;
    if (!config.horizon && !p.duration)
      throw ConfigError("set horizon or a profile duration");
    out.horizon = config.horizon ? *config.horizon : *p.duration;
    out.trace = std::make_shared<const WorkloadTrace>(
        generate_trace(p, out.horizon, derive_seeds(config.seed).workload));
    return out;
  }
  if (!config.trace_path) throw ConfigError("no workload source configured");
  WorkloadTrace trace = load_trace(*config.trace_path);
  out.horizon = config.horizon ? *config.horizon : trace.duration;
  if (!(out.horizon > 0.0)) throw ConfigError("trace '" + *config.trace_path + "' is empty and no horizon is set");
  std::erase_if(trace.requests, [&](const Request& r) { return r.arrival_time > out.horizon; });
  trace.duration = out.horizon;
  out.trace = std::make_shared<const WorkloadTrace>(std::move(trace));
  return out;
}

ExperimentSummary summarize(const SimulationResult& result, std::uint64_t seed) {
  ExperimentSummary s;
  s.policy = result.policy;
  s.seed = seed;
  s.horizon = result.horizon;
  s.submitted = result.totals.submitted;
  s.successes = result.totals.successes;
  s.failures = result.totals.failures;
  s.vm_cycles = result.totals.cycles_charged;
  s.failed_fraction = s.submitted ? static_cast<double>(s.failures) / static_cast<double>(s.submitted) : 0.0;
  s.revenue = result.aggregate.revenue;
  s.penalty = result.aggregate.penalty;
  s.vm_cost = result.aggregate.vm_cost;
  s.aggregate_utility = result.aggregate.utility;
  for (const auto& r : result.records) {
    ++s.adaptations;
    s.launches += r.action_taken == Action::launch;
    s.releases += r.action_taken == Action::release;
    if (r.evaluated) {
      ++s.evaluated;
      s.total_debt += r.debt;
    }
  }
  s.mean_debt = s.evaluated ? s.total_debt / static_cast<double>(s.evaluated) : 0.0;
  return s;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.qtable_in && config.policy != PolicyKind::debt_aware)
    throw ConfigError("qtable_in only applies to the debt-aware policy");

  QTable initial;
  if (config.qtable_in) {
    std::ifstream in(*config.qtable_in);
    if (!in) throw IoError("cannot open Q-table '" + *config.qtable_in + "'");
    initial = QTable::read_csv(in);
  }
  const PreparedWorkload workload = prepare_workload(config);

  RunOptions options;
  options.horizon = workload.horizon;
  options.record_debt = config.record_debt;
  options.log_outcomes = false;
  options.thresholds = config.thresholds;

  ExperimentReport report;
  const auto t0 = std::chrono::steady_clock::now();
  if (config.policy == PolicyKind::debt_aware) {
    DebtAwarePolicy policy(config.learning, derive_seeds(config.seed).exploration, config.thresholds, initial);
    report.result = run(config.sim, workload.trace, policy, options);
    report.qtable = policy.q_table();
  } else {
    VotingPolicy policy(config.voting);
    report.result = run(config.sim, workload.trace, policy, options);
  }
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.summary = summarize(report.result, config.seed);
  return report;
}

namespace {

using detail::format_fixed;

std::string t3(double t) { return format_fixed(t, 3); }
std::string m6(double v) { return format_fixed(v, 6); }

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string opt_money(const std::optional<double>& v) { return v ? m6(*v) : std::string(); }

std::vector<std::pair<std::string, std::string>> summary_fields(const ExperimentSummary& s) {
  return {
      {"policy", s.policy},
      {"seed", std::to_string(s.seed)},
      {"horizon", t3(s.horizon)},
      {"submitted", std::to_string(s.submitted)},
      {"successes", std::to_string(s.successes)},
      {"failures", std::to_string(s.failures)},
      {"failed_fraction", format_fixed(s.failed_fraction, 9)},
      {"vm_cycles", std::to_string(s.vm_cycles)},
      {"revenue", m6(s.revenue)},
      {"penalty", m6(s.penalty)},
      {"vm_cost", m6(s.vm_cost)},
      {"aggregate_utility", m6(s.aggregate_utility)},
      {"adaptations", std::to_string(s.adaptations)},
      {"launches", std::to_string(s.launches)},
      {"releases", std::to_string(s.releases)},
      {"evaluated", std::to_string(s.evaluated)},
      {"total_debt", m6(s.total_debt)},
      {"mean_debt", m6(s.mean_debt)},
  };
}

}  // namespace

void emit_csv(const ExperimentReport& report, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec || !std::filesystem::is_directory(root))
    throw IoError("cannot create output directory '" + dir + "'" + (ec ? ": " + ec.message() : ""));

  const auto& res = report.result;
  std::ostringstream prov, pen, debt, util, summary;
  prov << "time,ready_vms,pending_vms,provisioned_vms,ideal_vms\n";
  pen << "time,submitted,successes,failures,penalized_failures,penalty\n";
  util << "time,revenue,penalty,vm_cost,utility,cumulative_utility\n";
  debt << "time,state_queued,state_billing,requested,action,ideal_action,provisioned,ideal_provisioned,"
          "window_end,u_actual,u_ideal,debt,u_maintain,u_launch,u_release\n";

  for (const auto& w : res.windows) {
    const auto& u = w.utility;
    prov << t3(w.end) << ',' << w.ready_vms << ',' << w.pending_vms << ',' << w.provisioned_vms << ','
         << w.ideal_vms << '\n';
    pen << t3(w.end) << ',' << w.submitted << ',' << u.successes << ',' << u.failures << ','
        << u.penalized_failures << ',' << m6(u.penalty) << '\n';
    util << t3(w.end) << ',' << m6(u.revenue) << ',' << m6(u.penalty) << ',' << m6(u.vm_cost) << ','
         << m6(u.utility) << ',' << m6(w.cumulative_utility) << '\n';
  }
  for (const auto& r : res.records) {
    if (!r.evaluated) continue;
    debt << t3(r.time) << ',' << to_string(r.state.queued) << ',' << to_string(r.state.billing_idle) << ','
         << to_string(r.requested) << ',' << to_string(r.action_taken) << ',' << to_string(r.ideal_action) << ','
         << r.provisioned_after << ',' << r.ideal_provisioned << ',' << t3(r.window_end) << ','
         << m6(r.u_actual) << ',' << m6(r.u_ideal) << ',' << m6(r.debt);
    for (const auto& v : r.per_action_utilities) debt << ',' << opt_money(v);
    debt << '\n';
  }
  summary << "key,value\n";
  for (const auto& [k, v] : summary_fields(report.summary)) summary << k << ',' << v << '\n';

  write_file(root / "provisioning.csv", prov.str());
  write_file(root / "penalties.csv", pen.str());
  write_file(root / "debt.csv", debt.str());
  write_file(root / "utility.csv", util.str());
  write_file(root / "summary.csv", summary.str());
  if (report.qtable) {
    std::ostringstream q;
    report.qtable->write_csv(q);
    write_file(root / "qtable.csv", q.str());
  }
}

ExperimentSummary read_summary(const std::string& dir) {
  const auto path = (std::filesystem::path(dir) / "summary.csv").string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || (lineno == 1 && body == "key,value")) continue;
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ParseError(lineno, path + ": expected 'key,value'");
    kv[std::string(body.substr(0, comma))] = std::string(body.substr(comma + 1));
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(0, path + ": missing key '" + key + "'");
    return it->second;
  };
  auto d = [&](const char* key) {
    auto v = detail::parse_double(get(key));
    if (!v) throw ParseError(0, path + ": bad number for '" + key + "'");
    return *v;
  };
  auto u = [&](const char* key) {
    auto v = detail::parse_int(get(key));
    if (!v || *v < 0) throw ParseError(0, path + ": bad count for '" + key + "'");
    return static_cast<std::uint64_t>(*v);
  };
  ExperimentSummary s;
  s.policy = get("policy");
  s.seed = u("seed");
  s.horizon = d("horizon");
  s.submitted = u("submitted");
  s.successes = u("successes");
  s.failures = u("failures");
  s.failed_fraction = d("failed_fraction");
  s.vm_cycles = u("vm_cycles");
  s.revenue = d("revenue");
  s.penalty = d("penalty");
  s.vm_cost = d("vm_cost");
  s.aggregate_utility = d("aggregate_utility");
  s.adaptations = u("adaptations");
  s.launches = u("launches");
  s.releases = u("releases");
  s.evaluated = u("evaluated");
  s.total_debt = d("total_debt");
  s.mean_debt = d("mean_debt");
  return s;
}

Comparison compare(const ExperimentSummary& a, const ExperimentSummary& b) {
  if (std::abs(a.horizon - b.horizon) > 1e-9)
    throw ValidationError("cannot compare runs with different horizons (" + t3(a.horizon) + " vs " +
                          t3(b.horizon) + ")");
  Comparison c;
  c.a = a;
  c.b = b;
  c.utility_delta = a.aggregate_utility - b.aggregate_utility;
  if (b.aggregate_utility != 0.0) c.utility_delta_pct = 100.0 * c.utility_delta / std::abs(b.aggregate_utility);
  c.failed_delta_points = 100.0 * (a.failed_fraction - b.failed_fraction);
  c.cost_delta = a.vm_cost - b.vm_cost;
  c.mean_debt_delta = a.mean_debt - b.mean_debt;
  return c;
}

std::string format_comparison(const Comparison& c) {
  auto signed_fixed = [](double v, int digits) {
    auto s = format_fixed(v, digits);
    return s.front() == '-' ? s : "+" + s;
  };
  std::ostringstream out;
  out << "metric,a,b,delta\n";
  out << "policy," << c.a.policy << ',' << c.b.policy << ",\n";
  out << "aggregate_utility," << format_fixed(c.a.aggregate_utility, 2) << ',' << format_fixed(c.b.aggregate_utility, 2)
      << ',' << signed_fixed(c.utility_delta, 2) << '\n';
  out << "utility_delta_pct,,,"
      << (c.utility_delta_pct ? signed_fixed(*c.utility_delta_pct, 2) + "%" : std::string("n/a")) << '\n';
  out << "failed_pct," << format_fixed(100.0 * c.a.failed_fraction, 2) << ',' << format_fixed(100.0 * c.b.failed_fraction, 2)
      << ',' << signed_fixed(c.failed_delta_points, 2) << '\n';
  out << "vm_cost," << format_fixed(c.a.vm_cost, 2) << ',' << format_fixed(c.b.vm_cost, 2) << ','
      << signed_fixed(c.cost_delta, 2) << '\n';
  out << "mean_debt," << format_fixed(c.a.mean_debt, 6) << ',' << format_fixed(c.b.mean_debt, 6) << ','
      << signed_fixed(c.mean_debt_delta, 6) << '\n';
  return out.str();
}

}  // namespace edebt
