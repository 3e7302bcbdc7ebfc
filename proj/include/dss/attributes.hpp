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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dss {

/// Expected remaining life-years at death, per age group.
struct LifeTable {
  std::vector<double> expected_remaining_years;

  void validate(std::size_t age_groups, bool require_non_increasing = true) const;
  friend bool operator==(const LifeTable&, const LifeTable&) = default;
};

/// Life-years lost per week of fully suspended cancer diagnosis, per age
/// group; a partial lockdown week counts `partial_factor` of a full week.
struct CancerDelayModel {
  std::vector<double> life_years_per_week_full_suspension;
  double partial_factor = 0.5;

  void validate(std::size_t age_groups) const;
  friend bool operator==(const CancerDelayModel&, const CancerDelayModel&) = default;
};

enum class PovertyBand { Children = 0, WorkingAge = 1, PensionAge = 2 };
inline constexpr std::size_t kPovertyBandCount = 3;

std::string_view to_string(PovertyBand band) noexcept;
/// "children", "working-age", "pension-age"; throws std::invalid_argument.
PovertyBand poverty_band_from_string(std::string_view s);

struct PovertyModel {
  double total_poverty_years = 4.37e6;
  double poverty_years_per_life_year = 8.8;
  std::array<double, kPovertyBandCount> age_shares{1.41 / 4.37, 2.54 / 4.37, 0.42 / 4.37};
  double reference_lockdown_weeks = 10.0;
  double partial_factor = 0.5;

  /// Life-years lost by `reference_lockdown_weeks` of complete lockdown.
  double reference_life_years() const noexcept {
    return total_poverty_years / poverty_years_per_life_year;
  }
  void validate() const;
  friend bool operator==(const PovertyModel&, const PovertyModel&) = default;
};

/// Sum_a deaths_a * remaining_years_a. Throws ValidationError when the table
/// does not cover every age group.
double covid_life_years(std::span<const double> deaths_by_age, const LifeTable& table);

double cancer_life_years(double weeks_complete, double weeks_partial, const CancerDelayModel& model);

/// Poverty life-years, optionally restricted to one coarse age band.
double poverty_life_years(double weeks_complete, double weeks_partial, const PovertyModel& model,
                          std::optional<PovertyBand> band = std::nullopt);

/// Redistributes `value` over target bands in proportion to `fractions`,
/// which must sum to 1 (within 1e-9). Throws ValidationError otherwise.
std::vector<double> split_age_band(double value, std::span<const double> fractions);

/// Row-stochastic map from one age stratification to another:
/// fractions[source][target].
struct BandMapping {
  std::vector<std::string> source_bands;
  std::vector<std::vector<double>> fractions;

  void validate(std::size_t target_count, const std::string& path = "mapping") const;
  friend bool operator==(const BandMapping&, const BandMapping&) = default;
};

/// Applies split_age_band to every source value and sums per target band.
std::vector<double> remap_age_bands(std::span<const double> source_values,
                                    const BandMapping& mapping, std::size_t target_count);

}  // namespace dss
