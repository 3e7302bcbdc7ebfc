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

#include "dss/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>

#include "dss/error.hpp"
#include "dss/version.hpp"

namespace dss {

void RunConfig::validate() const {
  if (n_runs < 1) throw ValidationError("run.n_runs", "must be >= 1");
  if (horizon_weeks < 1) throw ValidationError("run.horizon_weeks", "must be >= 1");
  if (!(p_log_sd >= 0.0) || !std::isfinite(p_log_sd)) {
    throw ValidationError("run.p_log_sd", "must be a nonnegative finite number");
  }
  if (!std::isfinite(p_log_mean)) throw ValidationError("run.p_log_mean", "must be finite");
  for (std::size_t i = 0; i < initial_infections.size(); ++i) {
    if (!(initial_infections[i] >= 0.0)) {
      throw ValidationError("run.initial_infections[" + std::to_string(i) + "]",
                            "must be nonnegative");
    }
  }
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RunStream::RunStream(std::uint64_t seed, std::uint64_t run_index) noexcept
    : state_(mix64(seed) ^ mix64((run_index + 1) * kGolden)) {}

std::uint64_t RunStream::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double RunStream::next_uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RunStream::next_normal() noexcept {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_p(RunStream& stream, const RunConfig& config) {
  const double z = stream.next_normal();
  return std::exp(config.p_log_mean + config.p_log_sd * z);
}

double run_p(const RunConfig& config, std::uint64_t run_index) {
  RunStream stream(config.seed, run_index);
  return sample_p(stream, config);
}

Trajectory simulate_strategy(const Strategy& strategy, double p, const RunConfig& config,
                             const EpiModel& model, const SimulationOptions& options) {
  config.validate();
  const EpiRates rates = model.rates_with(p);
  rates.validate();

  CompartmentState state = CompartmentState::seeded(model.populations, config.initial_infections,
                                                    config.seed_age_group);
  CompartmentState next(state.regions(), state.age_groups(), 0);
  const double population = state.total_population();
  const int days = config.horizon_days();

  Trajectory traj;
  traj.weekly_regimes.reserve(static_cast<std::size_t>(config.horizon_weeks));
  traj.daily_deaths.reserve(static_cast<std::size_t>(days));
  traj.daily_infected.reserve(static_cast<std::size_t>(days) + 1);
  if (options.record_states) {
    traj.daily_states.reserve(static_cast<std::size_t>(days) + 1);
    traj.daily_states.push_back(state);
  }
  traj.daily_infected.push_back(state.total_infected());

  PolicyState policy;
  for (int week = 0; week < config.horizon_weeks; ++week) {
    if (week >= 1) {
      const double lagged = traj.daily_infected[static_cast<std::size_t>(7 * (week - 1))];
      const Observation obs{state.total_dead(), population > 0.0 ? lagged / population : 0.0,
                            week};
      const Regime target = decide_transition(strategy, policy, obs);
      policy = advance_policy(policy, obs, target);
    }
    const Regime regime = policy.current_regime;
    traj.weekly_regimes.push_back(regime);
    ++traj.weeks_in_regime[index_of(regime)];

    for (int d = 0; d < 7; ++d) {
      step_into(state, rates, regime, next);
      if (options.on_step) options.on_step(state, next);
      const double dead_before = state.total_dead();
      std::swap(state, next);
      traj.daily_deaths.push_back(state.total_dead() - dead_before);
      traj.daily_infected.push_back(state.total_infected());
      if (options.record_states) traj.daily_states.push_back(state);
    }
  }
  traj.deaths_by_age = state.dead_by_age();
  return traj;
}

double StrategyEnsemble::expected_total_deaths() const {
  double total = 0.0;
  for (double d : expected_deaths_by_age) total += d;
  return total;
}

const StrategyEnsemble* EnsembleResult::find(const std::string& strategy_id) const {
  for (const auto& s : strategies) {
    if (s.strategy_id == strategy_id) return &s;
  }
  return nullptr;
}

namespace {

std::string describe(const std::vector<RunFailure>& failures) {
  std::string msg = "ensemble rejected: " + std::to_string(failures.size()) + " failed run(s)";
  const std::size_t shown = std::min<std::size_t>(failures.size(), 5);
  for (std::size_t k = 0; k < shown; ++k) {
    msg += "; strategy " + std::to_string(failures[k].strategy_index) + " run " +
           std::to_string(failures[k].run_index) + ": " + failures[k].message;
  }
  return msg;
}

struct RunOutput {
  RunSummary summary;
  std::vector<double> daily_deaths;
  std::vector<Regime> weekly_regimes;
};

// Runs `task(i)` for i in [0, count) over `threads` workers.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  const unsigned n = std::min<std::size_t>(threads, count);
  workers.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
}

}  // namespace

EnsembleError::EnsembleError(std::vector<RunFailure> failures)
    : std::runtime_error(describe(failures)), failures_(std::move(failures)) {}

EnsembleResult run_ensemble(std::span<const Strategy> strategies, const RunConfig& config,
                            const EpiModel& model, const EnsembleOptions& options) {
  config.validate();
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    strategies[s].validate("strategies[" + std::to_string(s) + "]");
  }

  const std::size_t runs = config.n_runs;
  const unsigned threads =
      options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());

  EnsembleResult result;
  result.provenance = {config.seed, runs, options.config_hash, std::string(kEngineVersion)};
  result.p_draws.resize(runs);
  for (std::size_t r = 0; r < runs; ++r) result.p_draws[r] = run_p(config, r);

  const std::size_t total = strategies.size() * runs;
  std::atomic<std::size_t> completed{0};
  std::vector<RunOutput> outputs(total);
  std::vector<RunFailure> failures;
  std::mutex failure_mutex;

  parallel_for(total, threads, [&](std::size_t task) {
    const std::size_t s = task / runs;
    const std::size_t r = task % runs;
    try {
      SimulationOptions sim;
      sim.record_states = false;
      if (options.on_step) {
        sim.on_step = [&, s, r](const CompartmentState& a, const CompartmentState& b) {
          options.on_step(s, r, a, b);
        };
      }
      Trajectory traj = simulate_strategy(strategies[s], result.p_draws[r], config, model, sim);
      RunOutput& out = outputs[task];
      out.summary = {std::move(traj.deaths_by_age), traj.weeks_in_regime};
      out.daily_deaths = std::move(traj.daily_deaths);
      out.weekly_regimes = std::move(traj.weekly_regimes);
    } catch (const std::exception& e) {
      std::lock_guard lock(failure_mutex);
      failures.push_back({s, r, e.what()});
    }
    const std::size_t done = completed.fetch_add(1) + 1;
    if (options.on_progress) options.on_progress(done, total);
  });

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end(), [](const RunFailure& a, const RunFailure& b) {
      return std::tie(a.strategy_index, a.run_index) < std::tie(b.strategy_index, b.run_index);
    });
    throw EnsembleError(std::move(failures));
  }

  // Reduction in run order.
  const auto n = static_cast<double>(runs);
  result.strategies.reserve(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    StrategyEnsemble ens;
    ens.strategy_id = strategies[s].id;
    ens.expected_deaths_by_age.assign(model.age_groups(), 0.0);
    ens.expected_daily_deaths.assign(static_cast<std::size_t>(config.horizon_days()), 0.0);
    ens.runs.reserve(runs);
    std::array<double, kRegimeCount> week_sums{};
    for (std::size_t r = 0; r < runs; ++r) {
      RunOutput& out = outputs[s * runs + r];
      for (std::size_t a = 0; a < ens.expected_deaths_by_age.size(); ++a) {
        ens.expected_deaths_by_age[a] += out.summary.deaths_by_age[a];
      }
      for (std::size_t k = 0; k < kRegimeCount; ++k) week_sums[k] += out.summary.weeks_in_regime[k];
      for (std::size_t d = 0; d < ens.expected_daily_deaths.size(); ++d) {
        ens.expected_daily_deaths[d] += out.daily_deaths[d];
      }
      if (r == 0) {
        ens.example_daily_deaths = out.daily_deaths;
        ens.example_weekly_regimes = out.weekly_regimes;
      }
      ens.runs.push_back(std::move(out.summary));
    }
    for (double& v : ens.expected_deaths_by_age) v /= n;
    for (double& v : ens.expected_daily_deaths) v /= n;
    for (std::size_t k = 0; k < kRegimeCount; ++k) {
      ens.expected_weeks_in_regime[k] = week_sums[k] / n;
    }
    result.strategies.push_back(std::move(ens));
  }
  return result;
}

}  // namespace dss
