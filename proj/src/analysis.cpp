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

#include "dss/analysis.hpp"

#include <stdexcept>

#include "dss/error.hpp"

namespace dss {

void AttributeModels::validate(std::size_t age_groups) const {
  life_table.validate(age_groups);
  cancer.validate(age_groups);
  poverty.validate();
  if (poverty_band_ages.source_bands.size() != kPovertyBandCount) {
    throw ValidationError("attributes.poverty.band_age_groups",
                          "expected the three bands children, working-age, pension-age");
  }
  poverty_band_ages.validate(age_groups, "attributes.poverty.band_age_groups");
}

std::vector<double> poverty_age_shares(const AttributeModels& models, std::size_t age_groups) {
  return remap_age_bands(models.poverty.age_shares, models.poverty_band_ages, age_groups);
}

namespace {

bool selected(const AgeMask& mask, std::size_t a) { return mask.empty() || mask.at(a); }

}  // namespace

AttributeVector strategy_attributes(const StrategyEnsemble& ensemble, const AttributeModels& models,
                                    const AgeMask& mask) {
  const std::size_t ages = ensemble.expected_deaths_by_age.size();
  if (!mask.empty() && mask.size() != ages) {
    throw std::invalid_argument("age mask dimension mismatch");
  }
  const double weeks_r2 = ensemble.expected_weeks_in_regime[index_of(Regime::CompleteLockdown)];
  const double weeks_r1 = ensemble.expected_weeks_in_regime[index_of(Regime::PartialLockdown)];

  AttributeVector out{std::vector<double>(kAttributeCount, 0.0)};
  if (mask.empty()) {
    out.a[kCovidAttribute] = covid_life_years(ensemble.expected_deaths_by_age, models.life_table);
    out.a[kCancerAttribute] = cancer_life_years(weeks_r2, weeks_r1, models.cancer);
    out.a[kPovertyAttribute] = poverty_life_years(weeks_r2, weeks_r1, models.poverty);
    return out;
  }

  std::vector<double> deaths(ages, 0.0);
  CancerDelayModel cancer = models.cancer;
  double poverty_share = 0.0;
  const auto shares = poverty_age_shares(models, ages);
  for (std::size_t a = 0; a < ages; ++a) {
    if (selected(mask, a)) {
      deaths[a] = ensemble.expected_deaths_by_age[a];
      poverty_share += shares[a];
    } else {
      cancer.life_years_per_week_full_suspension.at(a) = 0.0;
    }
  }
  out.a[kCovidAttribute] = covid_life_years(deaths, models.life_table);
  out.a[kCancerAttribute] = cancer_life_years(weeks_r2, weeks_r1, cancer);
  out.a[kPovertyAttribute] = poverty_share * poverty_life_years(weeks_r2, weeks_r1, models.poverty);
  return out;
}

std::vector<StrategyAttributes> attribute_table(const EnsembleResult& ensemble,
                                                const AttributeModels& models,
                                                const AgeMask& mask) {
  std::vector<StrategyAttributes> table;
  table.reserve(ensemble.strategies.size());
  for (const auto& s : ensemble.strategies) {
    table.push_back({s.strategy_id, strategy_attributes(s, models, mask)});
  }
  return table;
}

Partition default_partition(std::span<const Strategy> strategies) {
  Partition out;
  for (const auto& s : strategies) out[s.id] = s.can_enter_complete_lockdown();
  return out;
}

PartitionedTable split_by_partition(std::span<const StrategyAttributes> table,
                                    const Partition& partition) {
  PartitionedTable out;
  for (const auto& row : table) {
    const auto it = partition.find(row.strategy_id);
    if (it == partition.end()) {
      throw std::invalid_argument("strategy '" + row.strategy_id + "' missing from partition");
    }
    (it->second ? out.lockdown : out.non_lockdown).push_back(row);
  }
  return out;
}

CriticalWeightResult critical_weight_by_age(const EnsembleResult& ensemble,
                                            const AttributeModels& models, const AgeMask& mask,
                                            const Partition& partition) {
  const auto table = attribute_table(ensemble, models, mask);
  const auto sides = split_by_partition(table, partition);
  return critical_weight(sides.lockdown, sides.non_lockdown);
}

}  // namespace dss
