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

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dss/decision.hpp"
#include "dss/monte_carlo.hpp"
#include "dss/scenario_io.hpp"

namespace dss {

nlohmann::json ensemble_to_json(const EnsembleResult& result);
EnsembleResult ensemble_from_json(const nlohmann::json& j);

nlohmann::json attributes_to_json(const std::vector<StrategyAttributes>& table);
std::vector<StrategyAttributes> attributes_from_json(const nlohmann::json& j);

/// Attribute tables keyed by age filter ("all" plus each scenario filter).
using AttributeTables = std::map<std::string, std::vector<StrategyAttributes>>;
AttributeTables compute_attribute_tables(const Scenario& scenario, const EnsembleResult& result);

struct StoredRun {
  std::string id;
  std::string scenario_id;
  Scenario snapshot;
  EnsembleResult ensemble;
  AttributeTables attributes;
  std::string created_at;  // UTC, ISO 8601
};

/// Content-addressed directory store:
///   <root>/scenarios/<scenario-id>.json
///   <root>/runs/<run-id>/{snapshot.json, ensemble.json, attributes.json, meta.json}
///   <root>/exports/<run-id>.<ext>
/// Runs are written once (to a temporary directory, then renamed) and never
/// modified afterwards.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Stores the canonical form; returns its digest. Idempotent.
  std::string put_scenario(const Scenario& scenario);
  bool has_scenario(const std::string& id) const;
  Scenario get_scenario(const std::string& id) const;  // NotFoundError
  std::vector<std::string> list_scenarios() const;

  /// Digest of (canonical snapshot, seed, engine version), 32 hex digits.
  /// The snapshot already carries the seed and run count.
  static std::string run_id(const Scenario& snapshot);

  bool has_run(const std::string& id) const;
  /// Writes a completed run. Returns the run id; an existing run is left
  /// untouched.
  std::string put_run(const Scenario& snapshot, const EnsembleResult& result);
  StoredRun get_run(const std::string& id) const;  // NotFoundError
  std::vector<std::string> list_runs() const;
  std::filesystem::path run_dir(const std::string& id) const;

  std::filesystem::path export_path(const std::string& run_id, std::string_view extension) const;

 private:
  std::filesystem::path root_;
  mutable std::mutex write_mutex_;
};

/// Accepts a run id or a path to a run directory; returns the run id and
/// the store holding it.
std::pair<std::string, std::filesystem::path> resolve_run_reference(
    const std::string& reference, const std::filesystem::path& default_root);

}  // namespace dss
