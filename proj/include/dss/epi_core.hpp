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
#include <cstddef>
#include <span>
#include <vector>

#include "dss/error.hpp"
#include "dss/regime.hpp"

namespace dss {

struct StratumIndex {
  std::size_t region = 0;
  std::size_t age_group = 0;
};

struct Compartments {
  double S = 0.0;
  double I = 0.0;
  double R = 0.0;
  double D = 0.0;

  double total() const noexcept { return S + I + R + D; }
  friend bool operator==(const Compartments&, const Compartments&) = default;
};

/// Real-valued SIRD counts for every (region, age group) cell at one day.
///
/// Cells are stored region-major: cell(region, age) lives at
/// `region * age_groups() + age`.
class CompartmentState {
 public:
  CompartmentState() = default;
  CompartmentState(std::size_t regions, std::size_t age_groups, int day = 0);

  /// Fully susceptible population with `initial_infections[region]` people
  /// moved from S to I in `seed_age_group`. Throws ValidationError if a
  /// region has fewer susceptibles in that group than requested.
  static CompartmentState seeded(std::span<const std::vector<double>> populations,
                                 std::span<const double> initial_infections,
                                 std::size_t seed_age_group);

  std::size_t regions() const noexcept { return regions_; }
  std::size_t age_groups() const noexcept { return age_groups_; }
  int day() const noexcept { return day_; }
  void set_day(int day) noexcept { day_ = day; }

  Compartments& at(StratumIndex idx) { return cells_[idx.region * age_groups_ + idx.age_group]; }
  const Compartments& at(StratumIndex idx) const {
    return cells_[idx.region * age_groups_ + idx.age_group];
  }
  std::span<const Compartments> cells() const noexcept { return cells_; }
  std::span<Compartments> cells() noexcept { return cells_; }

  double region_population(std::size_t region) const;
  double region_infected(std::size_t region) const;
  double total_population() const;
  double total_infected() const;
  double total_dead() const;
  std::vector<double> dead_by_age() const;

  friend bool operator==(const CompartmentState&, const CompartmentState&) = default;

 private:
  std::size_t regions_ = 0;
  std::size_t age_groups_ = 0;
  int day_ = 0;
  std::vector<Compartments> cells_;
};

/// Throws DomainError if any compartment is negative or non-finite.
void validate_state(const CompartmentState& state);

struct EpiRates {
  std::vector<double> gamma;   // recovery per day, per age group
  std::vector<double> lambda;  // death per day, per age group
  double p = 0.0;              // transmission probability per contact
  // contacts[regime][age]
  std::array<std::vector<double>, kRegimeCount> contacts;

  std::size_t age_groups() const noexcept { return gamma.size(); }
  double beta(std::size_t age, Regime regime) const {
    return p * contacts[index_of(regime)][age];
  }
  void validate() const;
};

struct CalibrationInputs {
  std::vector<double> ifr;  // D_a
  int recovery_window = 28;
  double residual = 0.05;
  double r0 = 2.79;
  std::vector<double> population_weights;  // n_a
  std::vector<double> baseline_contacts;   // c_a under no restrictions

  void validate() const;
  friend bool operator==(const CalibrationInputs&, const CalibrationInputs&) = default;
};

/// Per-day probability of leaving I (recovery or death) such that
/// 1 - residual of an infected cohort has left after `recovery_window` days:
/// 1 - residual^(1/window).
double calibrate_removal_rate(int recovery_window, double residual);

struct RateSplit {
  double gamma = 0.0;
  double lambda = 0.0;
};

/// Splits the total removal rate so that lambda / (gamma + lambda) == ifr.
RateSplit split_rates(double ifr, double total_rate);

/// Transmission probability reproducing r0 as the population-weighted mean
/// number of secondary infections under baseline contacts. `total_rate` is
/// gamma_a + lambda_a, shared by every age group.
double calibrate_transmission_probability(const CalibrationInputs& inputs, double total_rate);

/// Contact maps per regime. Defaults: r0 keeps baseline, r1 halves it, r2 is a
/// flat count. A non-empty override replaces the rule for that regime.
struct RegimeContactRules {
  double partial_factor = 0.5;
  double complete_contacts = 3.0;
  std::array<std::vector<double>, kRegimeCount> overrides;

  friend bool operator==(const RegimeContactRules&, const RegimeContactRules&) = default;
};

std::vector<double> regime_contacts(std::span<const double> baseline_contacts, Regime regime,
                                    const RegimeContactRules& rules = {});

/// One day of the stratified SIRD difference equations. Ages mix uniformly
/// within a region; regions do not mix. When the infection inflow would
/// exceed S it is truncated to S.
CompartmentState step(const CompartmentState& state, const EpiRates& rates, Regime regime);

/// As `step`, writing into `out` (resized as needed) so hot loops can reuse
/// storage. `out` must not alias `state`.
void step_into(const CompartmentState& state, const EpiRates& rates, Regime regime,
               CompartmentState& out);

}  // namespace dss
