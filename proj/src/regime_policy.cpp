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

#include "dss/regime_policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "dss/error.hpp"

namespace dss {

void Strategy::validate(const std::string& path) const {
  if (id.empty()) throw ValidationError(path + ".id", "must be non-empty");
  if (initial_target == Regime::NoLockdown) {
    throw ValidationError(path + ".initial_target", "must be r1 or r2");
  }
  if (!(lockdown_threshold > 0.0) || !std::isfinite(lockdown_threshold)) {
    throw ValidationError(path + ".lockdown_threshold", "must be a positive death count");
  }
  if (easing_fraction && !(*easing_fraction >= 0.0 && *easing_fraction <= 1.0)) {
    throw ValidationError(path + ".easing_fraction", "must lie in [0, 1]");
  }
  if (tightening_rise && !(*tightening_rise >= 0.0) ) {
    throw ValidationError(path + ".tightening_rise", "must be nonnegative");
  }
}

namespace {

bool rose_by(double current, double previous, double rise) {
  // A flat zero series is not a rise.
  return current > previous && current >= (1.0 + rise) * previous;
}

}  // namespace

Regime decide_transition(const Strategy& strategy, const PolicyState& state,
                         const Observation& observation) {
  switch (state.current_regime) {
    case Regime::NoLockdown:
      if (observation.cumulative_deaths >= strategy.lockdown_threshold) {
        return strategy.initial_target;
      }
      return Regime::NoLockdown;

    case Regime::PartialLockdown:
      if (strategy.tightening_rise && state.previous_infected_proportion &&
          rose_by(observation.infected_proportion, *state.previous_infected_proportion,
                  *strategy.tightening_rise)) {
        return Regime::CompleteLockdown;
      }
      return Regime::PartialLockdown;

    case Regime::CompleteLockdown: {
      if (!strategy.easing_fraction) return Regime::CompleteLockdown;
      const double peak = std::max(
          state.peak_infected_proportion_since_r2.value_or(observation.infected_proportion),
          observation.infected_proportion);
      if (observation.infected_proportion < *strategy.easing_fraction * peak) {
        return Regime::PartialLockdown;
      }
      return Regime::CompleteLockdown;
    }
  }
  return state.current_regime;
}

PolicyState advance_policy(const PolicyState& state, const Observation& observation, Regime next) {
  PolicyState out = state;
  const double seen = observation.infected_proportion;
  if (next == Regime::CompleteLockdown) {
    if (state.current_regime != Regime::CompleteLockdown) {
      out.peak_infected_proportion_since_r2 = seen;
    } else {
      out.peak_infected_proportion_since_r2 =
          std::max(state.peak_infected_proportion_since_r2.value_or(seen), seen);
    }
  } else {
    out.peak_infected_proportion_since_r2.reset();
  }
  out.has_left_r0 = state.has_left_r0 || next != Regime::NoLockdown;
  out.previous_infected_proportion = seen;
  out.current_regime = next;
  return out;
}

std::vector<Strategy> enumerate_standard_strategies() {
  constexpr std::array<std::pair<const char*, double>, 3> kLockdown{
      {{"L1", 100.0}, {"L2", 300.0}, {"L3", 500.0}}};
  constexpr std::array<std::pair<const char*, double>, 4> kEasing{
      {{"E0", 0.0}, {"E1", 0.12}, {"E2", 0.3}, {"E3", 0.5}}};

  std::vector<Strategy> out;
  out.reserve(kLockdown.size() * (kEasing.size() + 1));
  for (const auto& [l_name, threshold] : kLockdown) {
    for (const auto& [e_name, fraction] : kEasing) {
      out.push_back(Strategy{std::string(l_name) + "_" + e_name, Regime::CompleteLockdown,
                             threshold, fraction, kDefaultTighteningRise});
    }
    out.push_back(Strategy{std::string(l_name) + "_E*", Regime::PartialLockdown, threshold,
                           std::nullopt, std::nullopt});
  }
  return out;
}

}  // namespace dss
