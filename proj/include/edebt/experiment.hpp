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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "edebt/config.hpp"
#include "edebt/policies.hpp"
#include "edebt/runner.hpp"
#include "edebt/workload.hpp"

namespace edebt {

/// Independent RNG streams derived from the experiment seed.
struct SeedStreams {
  std::uint64_t workload = 0;
  std::uint64_t exploration = 0;
};
SeedStreams derive_seeds(std::uint64_t seed) noexcept;

/// Headline numbers of one run; round-trips through summary.csv.
struct ExperimentSummary {
  std::string policy;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::uint64_t submitted = 0;
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t vm_cycles = 0;
  double failed_fraction = 0.0;  // failures / submitted, 0 when nothing was submitted
  double revenue = 0.0;
  double penalty = 0.0;
  double vm_cost = 0.0;
  double aggregate_utility = 0.0;
  std::uint64_t adaptations = 0;  // consulted decision points
  std::uint64_t launches = 0;
  std::uint64_t releases = 0;
  std::uint64_t evaluated = 0;  // adaptations with a computed debt
  double total_debt = 0.0;
  double mean_debt = 0.0;
};

struct ExperimentReport {
  ExperimentSummary summary;
  SimulationResult result;
  std::optional<QTable> qtable;  // debt-aware runs only
  double wall_clock_seconds = 0.0;  // never written to disk
};

struct PreparedWorkload {
  std::shared_ptr<const WorkloadTrace> trace;
  double horizon = 0.0;  // explicit, else the workload duration
};

/// Loads or generates the workload named by the config. Trace requests
/// arriving after the horizon are dropped.
PreparedWorkload prepare_workload(const ExperimentConfig& config);

/// Validates the config, loads every input, then simulates. Writes nothing.
ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentSummary summarize(const SimulationResult& result, std::uint64_t seed);

/// Writes provisioning.csv, penalties.csv, debt.csv, utility.csv,
/// summary.csv and (debt-aware) qtable.csv into `dir`, creating it.
/// Throws IoError naming the offending path.
void emit_csv(const ExperimentReport& report, const std::string& dir);

ExperimentSummary read_summary(const std::string& dir);

struct Comparison {
  ExperimentSummary a;
  ExperimentSummary b;
  double utility_delta = 0.0;
  std::optional<double> utility_delta_pct;  // relative to |b|; absent when b is 0
  double failed_delta_points = 0.0;         // percentage points
  double cost_delta = 0.0;
  double mean_debt_delta = 0.0;
};

/// a relative to b. Throws ValidationError when the horizons differ.
Comparison compare(const ExperimentSummary& a, const ExperimentSummary& b);
std::string format_comparison(const Comparison& c);

}  // namespace edebt
