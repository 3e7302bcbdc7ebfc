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

#include "dss/epi_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dss {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::NoLockdown:
      return "r0";
    case Regime::PartialLockdown:
      return "r1";
    case Regime::CompleteLockdown:
      return "r2";
  }
  return "r?";
}

Regime regime_from_string(std::string_view s) {
  if (s == "r0" || s == "no_lockdown") return Regime::NoLockdown;
  if (s == "r1" || s == "partial_lockdown") return Regime::PartialLockdown;
  if (s == "r2" || s == "complete_lockdown") return Regime::CompleteLockdown;
  throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

CompartmentState::CompartmentState(std::size_t regions, std::size_t age_groups, int day)
    : regions_(regions), age_groups_(age_groups), day_(day), cells_(regions * age_groups) {}

CompartmentState CompartmentState::seeded(std::span<const std::vector<double>> populations,
                                          std::span<const double> initial_infections,
                                          std::size_t seed_age_group) {
  if (populations.empty()) throw ValidationError("populations", "no regions");
  const std::size_t ages = populations.front().size();
  if (initial_infections.size() != populations.size()) {
    throw ValidationError("run.initial_infections", "expected one entry per region");
  }
  if (seed_age_group >= ages) throw ValidationError("run.seed_age_group", "out of range");

  CompartmentState state(populations.size(), ages, 0);
  for (std::size_t i = 0; i < populations.size(); ++i) {
    if (populations[i].size() != ages) {
      throw ValidationError("populations[" + std::to_string(i) + "]", "ragged age dimension");
    }
    for (std::size_t a = 0; a < ages; ++a) {
      state.at({i, a}).S = populations[i][a];
    }
    auto& seed_cell = state.at({i, seed_age_group});
    const double infections = initial_infections[i];
    if (!(infections >= 0.0) || infections > seed_cell.S) {
      throw ValidationError("run.initial_infections[" + std::to_string(i) + "]",
                            "must be in [0, population of the seeded stratum]");
    }
    seed_cell.S -= infections;
    seed_cell.I = infections;
  }
  return state;
}

double CompartmentState::region_population(std::size_t region) const {
  double n = 0.0;
  for (std::size_t a = 0; a < age_groups_; ++a) n += at({region, a}).total();
  return n;
}

double CompartmentState::region_infected(std::size_t region) const {
  double n = 0.0;
  for (std::size_t a = 0; a < age_groups_; ++a) n += at({region, a}).I;
  return n;
}

double CompartmentState::total_population() const {
  double n = 0.0;
  for (const auto& c : cells_) n += c.total();
  return n;
}

double CompartmentState::total_infected() const {
  double n = 0.0;
  for (const auto& c : cells_) n += c.I;
  return n;
}

double CompartmentState::total_dead() const {
  double n = 0.0;
  for (const auto& c : cells_) n += c.D;
  return n;
}

std::vector<double> CompartmentState::dead_by_age() const {
  std::vector<double> out(age_groups_, 0.0);
  for (std::size_t i = 0; i < regions_; ++i) {
    for (std::size_t a = 0; a < age_groups_; ++a) out[a] += at({i, a}).D;
  }
  return out;
}

void validate_state(const CompartmentState& state) {
  const auto cells = state.cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    const bool ok = std::isfinite(c.S) && std::isfinite(c.I) && std::isfinite(c.R) &&
                    std::isfinite(c.D) && c.S >= 0.0 && c.I >= 0.0 && c.R >= 0.0 && c.D >= 0.0;
    if (!ok) {
      throw DomainError("compartment state invalid at region " +
                        std::to_string(k / state.age_groups()) + ", age group " +
                        std::to_string(k % state.age_groups()) + " (day " +
                        std::to_string(state.day()) + ")");
    }
  }
}

void EpiRates::validate() const {
  const std::size_t ages = gamma.size();
  if (lambda.size() != ages) throw DomainError("gamma/lambda age dimension mismatch");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("transmission probability outside [0, 1]");
  for (std::size_t a = 0; a < ages; ++a) {
    const double g = gamma[a];
    const double l = lambda[a];
    if (!(g >= 0.0 && l >= 0.0 && g + l <= 1.0)) {
      throw DomainError("removal rates outside [0, 1] for age group " + std::to_string(a));
    }
  }
  for (Regime r : kAllRegimes) {
    const auto& c = contacts[index_of(r)];
    if (c.size() != ages) throw DomainError("contacts age dimension mismatch");
    if (std::any_of(c.begin(), c.end(), [](double x) { return !(x >= 0.0); })) {
      throw DomainError("negative contact count");
    }
  }
}

void CalibrationInputs::validate() const {
  const std::size_t ages = ifr.size();
  for (double d : ifr) {
    if (!(d >= 0.0 && d < 1.0)) throw DomainError("ifr must lie in [0, 1)");
  }
  if (!(residual > 0.0 && residual < 1.0)) throw DomainError("residual must lie in (0, 1)");
  if (recovery_window < 1) throw DomainError("recovery_window must be >= 1");
  if (!(r0 > 0.0)) throw DomainError("r0 must be positive");
  if (population_weights.size() != ages || baseline_contacts.size() != ages) {
    throw DomainError("calibration inputs age dimension mismatch");
  }
  for (std::size_t a = 0; a < ages; ++a) {
    if (!(population_weights[a] >= 0.0) || !(baseline_contacts[a] >= 0.0)) {
      throw DomainError("population weights and contacts must be nonnegative");
    }
  }
}

double calibrate_removal_rate(int recovery_window, double residual) {
  if (recovery_window < 1) throw DomainError("recovery_window must be >= 1");
  if (!(residual > 0.0 && residual < 1.0)) throw DomainError("residual must lie in (0, 1)");
  return 1.0 - std::pow(residual, 1.0 / static_cast<double>(recovery_window));
}

RateSplit split_rates(double ifr, double total_rate) {
  if (!(ifr >= 0.0 && ifr < 1.0)) throw DomainError("ifr must lie in [0, 1)");
  if (!(total_rate > 0.0 && total_rate <= 1.0)) throw DomainError("total_rate must lie in (0, 1]");
  const double lambda = ifr * total_rate;
  return {total_rate - lambda, lambda};
}

double calibrate_transmission_probability(const CalibrationInputs& inputs, double total_rate) {
  inputs.validate();
  if (!(total_rate > 0.0 && total_rate <= 1.0)) throw DomainError("total_rate must lie in (0, 1]");
  // sum_t (1 - gamma - lambda)^t = 1 / (gamma + lambda)
  const double infectious_days = 1.0 / total_rate;
  double weight_sum = 0.0;
  double contact_days = 0.0;
  for (std::size_t a = 0; a < inputs.ifr.size(); ++a) {
    weight_sum += inputs.population_weights[a];
    contact_days += inputs.population_weights[a] * inputs.baseline_contacts[a] * infectious_days;
  }
  if (!(contact_days > 0.0)) {
    throw DomainError("degenerate calibration: population-weighted contacts are zero");
  }
  return inputs.r0 * weight_sum / contact_days;
}

std::vector<double> regime_contacts(std::span<const double> baseline_contacts, Regime regime,
                                    const RegimeContactRules& rules) {
  const auto& override_map = rules.overrides[index_of(regime)];
  if (!override_map.empty()) {
    if (override_map.size() != baseline_contacts.size()) {
      throw DomainError("contact override age dimension mismatch for regime " +
                        std::string(to_string(regime)));
    }
    return override_map;
  }
  std::vector<double> out(baseline_contacts.begin(), baseline_contacts.end());
  switch (regime) {
    case Regime::NoLockdown:
      break;
    case Regime::PartialLockdown:
      for (double& c : out) c *= rules.partial_factor;
      break;
    case Regime::CompleteLockdown:
      std::fill(out.begin(), out.end(), rules.complete_contacts);
      break;
  }
  return out;
}

void step_into(const CompartmentState& state, const EpiRates& rates, Regime regime,
               CompartmentState& out) {
  validate_state(state);
  const std::size_t ages = state.age_groups();
  if (rates.age_groups() != ages) throw DomainError("rates/state age dimension mismatch");
  if (out.regions() != state.regions() || out.age_groups() != ages) {
    out = CompartmentState(state.regions(), ages, state.day());
  }
  const auto& contacts = rates.contacts[index_of(regime)];

  for (std::size_t i = 0; i < state.regions(); ++i) {
    const double n_region = state.region_population(i);
    const double prevalence = n_region > 0.0 ? state.region_infected(i) / n_region : 0.0;
    for (std::size_t a = 0; a < ages; ++a) {
      const Compartments& c = state.at({i, a});
      const double force = std::min(1.0, rates.p * contacts[a] * prevalence);
      const double infections = force * c.S;
      const double recoveries = rates.gamma[a] * c.I;
      const double deaths = rates.lambda[a] * c.I;

      Compartments& next = out.at({i, a});
      next.S = c.S - infections;
      next.I = c.I + infections - recoveries - deaths;
      next.R = c.R + recoveries;
      next.D = c.D + deaths;
      // Rounding can leave -0 or a few ulps below zero when S or I empties.
      if (next.S < 0.0) next.S = 0.0;
      if (next.I < 0.0) next.I = 0.0;
    }
  }
  out.set_day(state.day() + 1);
}

CompartmentState step(const CompartmentState& state, const EpiRates& rates, Regime regime) {
  CompartmentState out(state.regions(), state.age_groups(), state.day());
  step_into(state, rates, regime, out);
  return out;
}

}  // namespace dss
