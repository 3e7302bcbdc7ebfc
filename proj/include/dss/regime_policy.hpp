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

#include <optional>
#include <string>
#include <vector>

#include "dss/regime.hpp"

namespace dss {

/// A countermeasure strategy: when to leave r0, and the rules for moving
/// between r1 and r2 afterwards.
///
/// Standard lockdown strategies ("L2_E1") go r0 -> r2 once cumulative deaths
/// reach `lockdown_threshold`, ease r2 -> r1 on `easing_fraction` and tighten
/// r1 -> r2 on `tightening_rise`. The "E*" family goes r0 -> r1 and stays there:
/// both optional rules are absent.
struct Strategy {
  std::string id;
  Regime initial_target = Regime::CompleteLockdown;
  double lockdown_threshold = 0.0;        // cumulative deaths, persons
  std::optional<double> easing_fraction;  // of the peak observed proportion since r2 entry
  std::optional<double> tightening_rise;  // proportional weekly rise, e.g. 0.05

  /// True when the strategy can ever reach complete lockdown.
  bool can_enter_complete_lockdown() const noexcept {
    return initial_target == Regime::CompleteLockdown || tightening_rise.has_value();
  }

  /// Throws ValidationError naming the field (prefixed by `path`).
  void validate(const std::string& path = "strategy") const;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// What the decision centre knows at a weekly decision epoch. Deaths are
/// current; the infected proportion lags by one week.
struct Observation {
  double cumulative_deaths = 0.0;
  double infected_proportion = 0.0;
  int week_index = 0;
};

struct PolicyState {
  Regime current_regime = Regime::NoLockdown;
  // Maximum observed proportion since the last entry into r2; empty outside r2.
  std::optional<double> peak_infected_proportion_since_r2;
  bool has_left_r0 = false;
  // Observed proportion at the previous decision epoch (tightening comparator).
  std::optional<double> previous_infected_proportion;

  friend bool operator==(const PolicyState&, const PolicyState&) = default;
};

/// Regime for the coming week. At most one transition per call; r0 is never
/// re-entered once left. Pure function of its arguments.
Regime decide_transition(const Strategy& strategy, const PolicyState& state,
                         const Observation& observation);

/// Policy state after applying `next` at this epoch: records the observation
/// for the tightening comparator and resets the easing peak on entry to r2.
PolicyState advance_policy(const PolicyState& state, const Observation& observation, Regime next);

/// The 15 strategies of the standard grid: L{1,2,3} x E{0,1,2,3} with an
/// initial move to r2, plus L{1,2,3}_E* with an initial move to r1.
std::vector<Strategy> enumerate_standard_strategies();

inline constexpr double kDefaultTighteningRise = 0.05;

}  // namespace dss
