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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dss/analysis.hpp"
#include "dss/epi_core.hpp"
#include "dss/error.hpp"
#include "dss/monte_carlo.hpp"
#include "dss/regime_policy.hpp"

namespace dss {

inline constexpr int kScenarioSchemaVersion = 1;

enum class ScenarioErrorKind { Parse, SchemaVersion, Invariant };

class ScenarioError : public ValidationError {
 public:
  ScenarioError(ScenarioErrorKind kind, std::string field_path, std::string reason)
      : ValidationError(std::move(field_path), std::move(reason)), kind_(kind) {}
  ScenarioErrorKind kind() const noexcept { return kind_; }

 private:
  ScenarioErrorKind kind_;
};

/// Citation for a data table pulled in through a "$ref".
struct DataSource {
  std::string table;
  std::string version;
  std::string citation;
  friend bool operator==(const DataSource&, const DataSource&) = default;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  std::vector<std::string> regions;
  std::vector<std::string> age_groups;
  std::vector<std::vector<double>> populations;  // [region][age]
  CalibrationInputs calibration;                 // population_weights derived from populations
  RegimeContactRules contact_rules;
  std::vector<Strategy> strategies;
  RunConfig run;
  AttributeModels attributes;
  std::map<std::string, std::vector<std::string>> age_filters;  // name -> age group names
  std::vector<DataSource> sources;

  std::size_t age_index(std::string_view age_group) const;  // throws NotFoundError
  AgeMask age_mask(std::string_view filter) const;          // "all" or a configured filter
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Reads and validates a scenario file. `"$ref": "<relative path>"` objects
/// are replaced by the referenced table's "data" member and its citation is
/// appended to `sources`. Unknown fields are reported through `warnings`.
Scenario load_scenario(const std::filesystem::path& path,
                       std::vector<std::string>* warnings = nullptr);

/// As load_scenario for an in-memory document. With no `base_dir`, "$ref"s
/// are rejected (uploaded scenarios must be self-contained).
Scenario parse_scenario(const nlohmann::json& doc,
                        const std::optional<std::filesystem::path>& base_dir = std::nullopt,
                        std::vector<std::string>* warnings = nullptr);
Scenario parse_scenario_text(std::string_view text,
                             const std::optional<std::filesystem::path>& base_dir = std::nullopt,
                             std::vector<std::string>* warnings = nullptr);

/// Self-contained canonical form; parse_scenario(scenario_to_json(s)) == s.
nlohmann::json scenario_to_json(const Scenario& scenario);
std::string dump_scenario(const Scenario& scenario);

/// Hex SHA-256 of the canonical compact dump.
std::string scenario_digest(const Scenario& scenario);

/// Throws ScenarioError(Invariant) naming the first violated field.
void validate_scenario(const Scenario& scenario);

struct Calibration {
  double total_rate = 0.0;
  std::vector<RateSplit> rates;  // per age group
  double transmission_probability = 0.0;
};

Calibration calibrate(const Scenario& scenario);

/// Calibrated rates and per-regime contacts ready for simulation.
EpiModel build_epi_model(const Scenario& scenario);

/// Runs the scenario's strategies under its run config.
EnsembleResult run_scenario(const Scenario& scenario, const EnsembleOptions& options = {});

}  // namespace dss
