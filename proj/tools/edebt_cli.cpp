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

// edebt: run elasticity-debt experiments, compare runs, generate traces.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "edebt/config.hpp"
#include "edebt/error.hpp"
#include "edebt/experiment.hpp"
#include "edebt/workload.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::string> trace;
  std::optional<std::string> out;
  std::optional<std::string> qtable_in;
  std::optional<double> horizon;
  bool no_debt = false;
};

int cmd_run(const RunArgs& a) {
  edebt::ExperimentConfig cfg = edebt::load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.policy) {
    auto p = edebt::policy_from_string(*a.policy);
    if (!p) throw edebt::ConfigError("unknown policy '" + *a.policy + "'");
    cfg.policy = *p;
  }
  if (a.trace) {
    cfg.trace_path = *a.trace;
    cfg.profile.reset();
  }
  if (a.out) cfg.output_dir = *a.out;
  if (a.qtable_in) cfg.qtable_in = *a.qtable_in;
  if (a.horizon) cfg.horizon = *a.horizon;
  if (a.no_debt) cfg.record_debt = false;

  // Everything is loaded and validated before the output directory exists.
  const auto report = edebt::run_experiment(cfg);
  edebt::emit_csv(report, cfg.output_dir);

  const auto& s = report.summary;
  std::printf("%s seed=%llu utility=%.2f cost=%.2f failed=%.2f%% mean_debt=%.6f (%.1fs) -> %s\n",
              s.policy.c_str(), static_cast<unsigned long long>(s.seed), s.aggregate_utility, s.vm_cost,
              100.0 * s.failed_fraction, s.mean_debt, report.wall_clock_seconds, cfg.output_dir.c_str());
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b) {
  const auto c = edebt::compare(edebt::read_summary(a), edebt::read_summary(b));
  std::cout << edebt::format_comparison(c);
  return 0;
}

int cmd_gen_trace(const std::string& profile_path, std::uint64_t seed, const std::string& out,
                  std::optional<double> duration) {
  const auto profile = edebt::load_profile(profile_path);
  if (!duration && !profile.duration) throw edebt::ConfigError("profile has no duration; pass --duration");
  const auto trace = edebt::generate_trace(profile, duration ? *duration : *profile.duration, seed);
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw edebt::IoError("cannot open '" + out + "' for writing");
  edebt::write_trace(f, trace);
  f.flush();
  if (!f) throw edebt::IoError("write failed for '" + out + "'");
  std::printf("%zu requests over %.0fs -> %s\n", trace.requests.size(), trace.duration, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elasticity-debt autoscaling simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Simulate one policy and write CSV results");
  run->add_option("--config", run_args.config, "Experiment config file")->required();
  run->add_option("--seed", run_args.seed, "Override the config seed");
  run->add_option("--policy", run_args.policy, "debt-aware or voting");
  run->add_option("--trace", run_args.trace, "Replay this trace instead of the config workload");
  run->add_option("--out", run_args.out, "Output directory");
  run->add_option("--qtable-in", run_args.qtable_in, "Initial Q-table CSV (debt-aware)");
  run->add_option("--horizon", run_args.horizon, "Simulated seconds");
  run->add_flag("--no-debt", run_args.no_debt, "Skip counterfactual debt for the voting policy");

  std::string dir_a, dir_b;
  auto* cmp = app.add_subcommand("compare", "Compare two result directories (A relative to B)");
  cmp->add_option("dir_a", dir_a)->required();
  cmp->add_option("dir_b", dir_b)->required();

  std::string profile, out;
  std::uint64_t seed = 1;
  std::optional<double> duration;
  auto* gen = app.add_subcommand("gen-trace", "Sample a request trace from a rate profile");
  gen->add_option("--profile", profile, "Rate profile file")->required();
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out, "Trace file to write")->required();
  gen->add_option("--duration", duration, "Seconds; defaults to the profile duration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args);
    if (*cmp) return cmd_compare(dir_a, dir_b);
    if (*gen) return cmd_gen_trace(profile, seed, out, duration);
  } catch (const edebt::ParseError& e) {
    std::fprintf(stderr, "edebt: parse error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "edebt: error: %s\n", e.what());
    return 1;
  }
  return 1;
}
