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

#include "dss/attributes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dss/error.hpp"

namespace dss {

namespace {

constexpr double kShareTolerance = 1e-9;

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double effective_weeks(double complete, double partial, double partial_factor) {
  if (!nonneg(complete) || !nonneg(partial)) {
    throw DomainError("lockdown week counts must be nonnegative");
  }
  return complete + partial_factor * partial;
}

}  // namespace

void LifeTable::validate(std::size_t age_groups, bool require_non_increasing) const {
  if (expected_remaining_years.size() != age_groups) {
    throw ValidationError("life_table.expected_remaining_years",
                          "expected " + std::to_string(age_groups) + " age groups");
  }
  for (std::size_t a = 0; a < age_groups; ++a) {
    const double v = expected_remaining_years[a];
    const std::string path = "life_table.expected_remaining_years[" + std::to_string(a) + "]";
    if (!nonneg(v)) throw ValidationError(path, "must be nonnegative");
    if (require_non_increasing && a > 0 && v > expected_remaining_years[a - 1]) {
      throw ValidationError(path, "must not increase with age");
    }
  }
}

void CancerDelayModel::validate(std::size_t age_groups) const {
  if (life_years_per_week_full_suspension.size() != age_groups) {
    throw ValidationError("cancer.life_years_per_week_full_suspension",
                          "expected " + std::to_string(age_groups) + " age groups");
  }
  for (std::size_t a = 0; a < age_groups; ++a) {
    if (!nonneg(life_years_per_week_full_suspension[a])) {
      throw ValidationError(
          "cancer.life_years_per_week_full_suspension[" + std::to_string(a) + "]",
          "must be nonnegative");
    }
  }
  if (!(partial_factor >= 0.0 && partial_factor <= 1.0)) {
    throw ValidationError("cancer.partial_factor", "must lie in [0, 1]");
  }
}

std::string_view to_string(PovertyBand band) noexcept {
  switch (band) {
    case PovertyBand::Children:
      return "children";
    case PovertyBand::WorkingAge:
      return "working-age";
    case PovertyBand::PensionAge:
      return "pension-age";
  }
  return "?";
}

PovertyBand poverty_band_from_string(std::string_view s) {
  if (s == "children") return PovertyBand::Children;
  if (s == "working-age") return PovertyBand::WorkingAge;
  if (s == "pension-age") return PovertyBand::PensionAge;
  throw std::invalid_argument("unknown poverty age band '" + std::string(s) + "'");
}

void PovertyModel::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(total_poverty_years)) {
    throw ValidationError("poverty.total_poverty_years", "must be positive");
  }
  if (!positive(poverty_years_per_life_year)) {
    throw ValidationError("poverty.poverty_years_per_life_year", "must be positive");
  }
  if (!positive(reference_lockdown_weeks)) {
    throw ValidationError("poverty.reference_lockdown_weeks", "must be positive");
  }
  if (!(partial_factor > 0.0 && partial_factor <= 1.0)) {
    throw ValidationError("poverty.partial_factor", "must lie in (0, 1]");
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < kPovertyBandCount; ++b) {
    if (!positive(age_shares[b])) {
      throw ValidationError("poverty.age_shares[" + std::to_string(b) + "]", "must be positive");
    }
    sum += age_shares[b];
  }
  if (std::abs(sum - 1.0) > kShareTolerance) {
    throw ValidationError("poverty.age_shares", "must sum to 1");
  }
}

double covid_life_years(std::span<const double> deaths_by_age, const LifeTable& table) {
  if (table.expected_remaining_years.size() < deaths_by_age.size()) {
    throw ValidationError("life_table.expected_remaining_years",
                          "missing entry for age group " +
                              std::to_string(table.expected_remaining_years.size()));
  }
  double total = 0.0;
  for (std::size_t a = 0; a < deaths_by_age.size(); ++a) {
    if (!nonneg(deaths_by_age[a])) throw DomainError("deaths must be nonnegative");
    total += deaths_by_age[a] * table.expected_remaining_years[a];
  }
  return total;
}

double cancer_life_years(double weeks_complete, double weeks_partial,
                         const CancerDelayModel& model) {
  const double weeks = effective_weeks(weeks_complete, weeks_partial, model.partial_factor);
  double slope = 0.0;
  for (double s : model.life_years_per_week_full_suspension) slope += s;
  return slope * weeks;
}

double poverty_life_years(double weeks_complete, double weeks_partial, const PovertyModel& model,
                          std::optional<PovertyBand> band) {
  const double weeks = effective_weeks(weeks_complete, weeks_partial, model.partial_factor);
  const double share = band ? model.age_shares[static_cast<std::size_t>(*band)] : 1.0;
  return model.reference_life_years() * share * weeks / model.reference_lockdown_weeks;
}

std::vector<double> split_age_band(double value, std::span<const double> fractions) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!nonneg(f)) throw ValidationError("fractions", "must be nonnegative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > kShareTolerance) {
    throw ValidationError("fractions", "must sum to 1 (got " + std::to_string(sum) + ")");
  }
  std::vector<double> out(fractions.size());
  for (std::size_t k = 0; k < fractions.size(); ++k) out[k] = value * fractions[k];
  return out;
}

void BandMapping::validate(std::size_t target_count, const std::string& path) const {
  if (fractions.size() != source_bands.size()) {
    throw ValidationError(path + ".fractions", "expected one row per source band");
  }
  for (std::size_t s = 0; s < fractions.size(); ++s) {
    const std::string row_path = path + ".fractions[" + std::to_string(s) + "]";
    if (fractions[s].size() != target_count) {
      throw ValidationError(row_path, "expected " + std::to_string(target_count) + " entries");
    }
    try {
      (void)split_age_band(1.0, fractions[s]);
    } catch (const ValidationError& e) {
      throw ValidationError(row_path, e.reason());
    }
  }
}

std::vector<double> remap_age_bands(std::span<const double> source_values,
                                    const BandMapping& mapping, std::size_t target_count) {
  mapping.validate(target_count);
  if (source_values.size() != mapping.source_bands.size()) {
    throw ValidationError("values", "expected one value per source band");
  }
  std::vector<double> out(target_count, 0.0);
  for (std::size_t s = 0; s < source_values.size(); ++s) {
    const auto parts = split_age_band(source_values[s], mapping.fractions[s]);
    for (std::size_t t = 0; t < target_count; ++t) out[t] += parts[t];
  }
  return out;
}

}  // namespace dss
