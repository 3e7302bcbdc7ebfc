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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dss/attributes.hpp"
#include "dss/decision.hpp"
#include "dss/monte_carlo.hpp"
#include "dss/regime_policy.hpp"

namespace dss {

struct AttributeModels {
  LifeTable life_table;
  CancerDelayModel cancer;
  PovertyModel poverty;
  // Coarse poverty bands (children, working-age, pension-age) onto the
  // model's age groups; used when attributes are restricted by age.
  BandMapping poverty_band_ages;

  void validate(std::size_t age_groups) const;
  friend bool operator==(const AttributeModels&, const AttributeModels&) = default;
};

/// Per-age-group mask; empty means "all ages".
using AgeMask = std::vector<bool>;

/// Fraction of the poverty total attributed to each age group.
std::vector<double> poverty_age_shares(const AttributeModels& models, std::size_t age_groups);

/// (a1, a2, a3) for one strategy from its ensemble expectations. With a mask,
/// each attribute only counts the selected age groups.
AttributeVector strategy_attributes(const StrategyEnsemble& ensemble, const AttributeModels& models,
                                    const AgeMask& mask = {});

std::vector<StrategyAttributes> attribute_table(const EnsembleResult& ensemble,
                                                const AttributeModels& models,
                                                const AgeMask& mask = {});

/// Strategy id -> true for the lockdown side of a critical-weight comparison.
using Partition = std::map<std::string, bool>;

/// Lockdown = can ever reach complete lockdown; E*-style strategies are not.
Partition default_partition(std::span<const Strategy> strategies);

struct PartitionedTable {
  std::vector<StrategyAttributes> lockdown;
  std::vector<StrategyAttributes> non_lockdown;
};

/// Throws std::invalid_argument for a strategy missing from the partition.
PartitionedTable split_by_partition(std::span<const StrategyAttributes> table,
                                    const Partition& partition);

/// Critical weight on attributes restricted to `mask`.
CriticalWeightResult critical_weight_by_age(const EnsembleResult& ensemble,
                                            const AttributeModels& models, const AgeMask& mask,
                                            const Partition& partition);

}  // namespace dss
