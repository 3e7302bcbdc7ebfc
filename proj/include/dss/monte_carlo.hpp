// Copyright 2026 The Countermeasure DSS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dss/epi_core.hpp"
#include "dss/regime_policy.hpp"

namespace dss {

struct RunConfig {
  std::size_t n_runs = 1000;
  int horizon_weeks = 40;
  std::uint64_t seed = 0;
  double p_log_mean = std::log(0.023);
  double p_log_sd = 0.1;
  std::vector<double> initial_infections;  // persons per region
  std::size_t seed_age_group = 2;          // age group receiving the initial infections

  int horizon_days() const noexcept { return 7 * horizon_weeks; }
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Everything the simulator needs besides the strategy and the sampled p.
struct EpiModel {
  std::vector<std::vector<double>> populations;  // [region][age]
  std::vector<double> gamma;
  std::vector<double> lambda;
  std::array<std::vector<double>, kRegimeCount> contacts;  // [regime][age]

  std::size_t regions() const noexcept { return populations.size(); }
  std::size_t age_groups() const noexcept { return gamma.size(); }
  EpiRates rates_with(double p) const { return EpiRates{gamma, lambda, p, contacts}; }
};

/// Counter-based random stream for one Monte Carlo run. The sequence depends
/// only on (seed, run_index), so scheduling order never changes a draw.
class RunStream {
 public:
  RunStream(std::uint64_t seed, std::uint64_t run_index) noexcept;

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept;  // open interval (0, 1)
  double next_normal() noexcept;   // standard normal, Box-Muller

 private:
  std::uint64_t state_;
};

/// exp(z) with z ~ Normal(p_log_mean, p_log_sd).
double sample_p(RunStream& stream, const RunConfig& config);

/// p for run `run_index`; identical for every strategy (common random numbers).
double run_p(const RunConfig& config, std::uint64_t run_index);

struct Trajectory {
  std::vector<CompartmentState> daily_states;  // days 0..7H, empty unless recorded
  std::vector<Regime> weekly_regimes;          // one per week
  std::array<int, kRegimeCount> weeks_in_regime{};
  std::vector<double> deaths_by_age;           // terminal D summed over regions
  std::vector<double> daily_deaths;            // new deaths on each of the 7H days
  std::vector<double> daily_infected;          // national I on days 0..7H
};

using StepObserver = std::function<void(const CompartmentState& before, const CompartmentState& after)>;

struct SimulationOptions {
  bool record_states = true;
  StepObserver on_step;
};

Trajectory simulate_strategy(const Strategy& strategy, double p, const RunConfig& config,
                             const EpiModel& model, const SimulationOptions& options = {});

struct RunSummary {
  std::vector<double> deaths_by_age;
  std::array<int, kRegimeCount> weeks_in_regime{};
  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct StrategyEnsemble {
  std::string strategy_id;
  std::vector<double> expected_deaths_by_age;
  std::array<double, kRegimeCount> expected_weeks_in_regime{};
  std::vector<double> expected_daily_deaths;
  // Run 0 kept whole for plotting a single realisation.
  std::vector<double> example_daily_deaths;
  std::vector<Regime> example_weekly_regimes;
  std::vector<RunSummary> runs;

  double expected_total_deaths() const;
  friend bool operator==(const StrategyEnsemble&, const StrategyEnsemble&) = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::size_t n_runs = 0;
  std::string config_hash;
  std::string engine_version;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct EnsembleResult {
  std::vector<double> p_draws;  // indexed by run
  std::vector<StrategyEnsemble> strategies;
  Provenance provenance;

  const StrategyEnsemble* find(const std::string& strategy_id) const;
  friend bool operator==(const EnsembleResult&, const EnsembleResult&) = default;
};

struct EnsembleOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::string config_hash;
  // Called from worker threads; must be thread-safe.
  std::function<void(std::size_t strategy_index, std::size_t run_index, const CompartmentState&,
                     const CompartmentState&)>
      on_step;
  // Called after each completed run with (completed, total); may be called concurrently.
  std::function<void(std::size_t, std::size_t)> on_progress;
};

struct RunFailure {
  std::size_t strategy_index = 0;
  std::size_t run_index = 0;
  std::string message;
};

class EnsembleError : public std::runtime_error {
 public:
  explicit EnsembleError(std::vector<RunFailure> failures);
  const std::vector<RunFailure>& failures() const noexcept { return failures_; }

 private:
  std::vector<RunFailure> failures_;
};

/// Runs `config.n_runs` trajectories per strategy. Run r of every strategy
/// uses the same p (stream r of `config.seed`). Means are reduced in run
/// order, so the result is bit-identical for any thread count. Throws
/// EnsembleError listing every failed (strategy, run).
EnsembleResult run_ensemble(std::span<const Strategy> strategies, const RunConfig& config,
                            const EpiModel& model, const EnsembleOptions& options = {});

}  // namespace dss
