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

#include "dss/result_store.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "dss/analysis.hpp"
#include "dss/digest.hpp"
#include "dss/error.hpp"
#include "dss/version.hpp"

namespace dss {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json regimes_to_json(const std::vector<Regime>& regimes) {
  json out = json::array();
  for (Regime r : regimes) out.push_back(index_of(r));
  return out;
}

std::vector<Regime> regimes_from_json(const json& j) {
  std::vector<Regime> out;
  for (const auto& v : j) {
    const auto i = v.get<std::size_t>();
    if (i >= kRegimeCount) throw std::runtime_error("regime index out of range");
    out.push_back(kAllRegimes[i]);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

// Writes via a sibling temporary file so readers never see partial content.
void write_file_atomic(const fs::path& path, const std::string& text) {
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter++);
  write_file(tmp, text);
  fs::rename(tmp, path);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) return false;
  }
  return true;
}

std::vector<std::string> list_ids(const fs::path& dir, bool directories, std::string_view suffix) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    std::string name = entry.path().filename().string();
    if (directories != entry.is_directory()) continue;
    if (!suffix.empty()) {
      if (name.size() <= suffix.size() || name.substr(name.size() - suffix.size()) != suffix) continue;
      name.resize(name.size() - suffix.size());
    }
    if (valid_id(name)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

json ensemble_to_json(const EnsembleResult& result) {
  json strategies = json::array();
  for (const auto& s : result.strategies) {
    json runs = json::array();
    for (const auto& r : s.runs) {
      runs.push_back({{"deaths_by_age", r.deaths_by_age}, {"weeks_in_regime", r.weeks_in_regime}});
    }
    strategies.push_back({{"strategy_id", s.strategy_id},
                          {"expected_deaths_by_age", s.expected_deaths_by_age},
                          {"expected_weeks_in_regime", s.expected_weeks_in_regime},
                          {"expected_daily_deaths", s.expected_daily_deaths},
                          {"example_daily_deaths", s.example_daily_deaths},
                          {"example_weekly_regimes", regimes_to_json(s.example_weekly_regimes)},
                          {"runs", std::move(runs)}});
  }
  return {{"provenance",
           {{"seed", result.provenance.seed},
            {"n_runs", result.provenance.n_runs},
            {"config_hash", result.provenance.config_hash},
            {"engine_version", result.provenance.engine_version}}},
          {"p_draws", result.p_draws},
          {"strategies", std::move(strategies)}};
}

EnsembleResult ensemble_from_json(const json& j) {
  EnsembleResult out;
  const auto& p = j.at("provenance");
  out.provenance.seed = p.at("seed").get<std::uint64_t>();
  out.provenance.n_runs = p.at("n_runs").get<std::size_t>();
  out.provenance.config_hash = p.at("config_hash").get<std::string>();
  out.provenance.engine_version = p.at("engine_version").get<std::string>();
  out.p_draws = j.at("p_draws").get<std::vector<double>>();
  for (const auto& s : j.at("strategies")) {
    StrategyEnsemble e;
    e.strategy_id = s.at("strategy_id").get<std::string>();
    e.expected_deaths_by_age = s.at("expected_deaths_by_age").get<std::vector<double>>();
    e.expected_weeks_in_regime = s.at("expected_weeks_in_regime").get<std::array<double, kRegimeCount>>();
    e.expected_daily_deaths = s.at("expected_daily_deaths").get<std::vector<double>>();
    e.example_daily_deaths = s.at("example_daily_deaths").get<std::vector<double>>();
    e.example_weekly_regimes = regimes_from_json(s.at("example_weekly_regimes"));
    for (const auto& r : s.at("runs")) {
      RunSummary run;
      run.deaths_by_age = r.at("deaths_by_age").get<std::vector<double>>();
      run.weeks_in_regime = r.at("weeks_in_regime").get<std::array<int, kRegimeCount>>();
      e.runs.push_back(std::move(run));
    }
    out.strategies.push_back(std::move(e));
  }
  return out;
}

json attributes_to_json(const std::vector<StrategyAttributes>& table) {
  json out = json::array();
  for (const auto& row : table) {
    out.push_back({{"strategy_id", row.strategy_id}, {"a", row.attributes.a}});
  }
  return out;
}

std::vector<StrategyAttributes> attributes_from_json(const json& j) {
  std::vector<StrategyAttributes> out;
  for (const auto& row : j) {
    out.push_back({row.at("strategy_id").get<std::string>(),
                   AttributeVector{row.at("a").get<std::vector<double>>()}});
  }
  return out;
}

AttributeTables compute_attribute_tables(const Scenario& scenario, const EnsembleResult& result) {
  AttributeTables out;
  out["all"] = attribute_table(result, scenario.attributes);
  for (const auto& [name, _] : scenario.age_filters) {
    out[name] = attribute_table(result, scenario.attributes, scenario.age_mask(name));
  }
  return out;
}

ResultStore::ResultStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "scenarios");
  fs::create_directories(root_ / "runs");
  fs::create_directories(root_ / "exports");
}

std::string ResultStore::put_scenario(const Scenario& scenario) {
  const std::string id = scenario_digest(scenario);
  const fs::path path = root_ / "scenarios" / (id + ".json");
  std::lock_guard lock(write_mutex_);
  if (!fs::exists(path)) write_file_atomic(path, dump_scenario(scenario));
  return id;
}

bool ResultStore::has_scenario(const std::string& id) const {
  return valid_id(id) && fs::exists(root_ / "scenarios" / (id + ".json"));
}

Scenario ResultStore::get_scenario(const std::string& id) const {
  if (!has_scenario(id)) throw NotFoundError("unknown scenario '" + id + "'");
  return parse_scenario_text(read_file(root_ / "scenarios" / (id + ".json")));
}

std::vector<std::string> ResultStore::list_scenarios() const {
  return list_ids(root_ / "scenarios", false, ".json");
}

std::string ResultStore::run_id(const Scenario& snapshot) {
  const std::string key = scenario_to_json(snapshot).dump() + "\n" +
                          std::to_string(snapshot.run.seed) + "\n" + std::string(kEngineVersion);
  return sha256_hex(key).substr(0, 32);
}

fs::path ResultStore::run_dir(const std::string& id) const { return root_ / "runs" / id; }

bool ResultStore::has_run(const std::string& id) const {
  return valid_id(id) && fs::exists(run_dir(id) / "meta.json");
}

std::string ResultStore::put_run(const Scenario& snapshot, const EnsembleResult& result) {
  const std::string id = run_id(snapshot);
  std::lock_guard lock(write_mutex_);
  if (has_run(id)) return id;
  const std::string scenario_id = scenario_digest(snapshot);
  const fs::path scenario_path = root_ / "scenarios" / (scenario_id + ".json");
  if (!fs::exists(scenario_path)) write_file_atomic(scenario_path, dump_scenario(snapshot));

  const fs::path tmp = root_ / "runs" / (".tmp-" + id + "-" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  write_file(tmp / "snapshot.json", dump_scenario(snapshot));
  write_file(tmp / "ensemble.json", ensemble_to_json(result).dump());
  json attrs = json::object();
  for (const auto& [name, table] : compute_attribute_tables(snapshot, result)) {
    attrs[name] = attributes_to_json(table);
  }
  write_file(tmp / "attributes.json", attrs.dump(1));
  const json meta = {{"run_id", id},
                     {"scenario_id", scenario_id},
                     {"seed", snapshot.run.seed},
                     {"n_runs", snapshot.run.n_runs},
                     {"engine_version", std::string(kEngineVersion)},
                     {"created_at", utc_now()}};
  write_file(tmp / "meta.json", meta.dump(2));

  std::error_code ec;
  fs::rename(tmp, run_dir(id), ec);
  if (ec) {
    fs::remove_all(tmp);
    if (!has_run(id)) throw std::runtime_error("failed to store run " + id + ": " + ec.message());
  }
  return id;
}

StoredRun ResultStore::get_run(const std::string& id) const {
  if (!has_run(id)) throw NotFoundError("unknown run '" + id + "'");
  const fs::path dir = run_dir(id);
  StoredRun out;
  out.id = id;
  const json meta = json::parse(read_file(dir / "meta.json"));
  out.scenario_id = meta.at("scenario_id").get<std::string>();
  out.created_at = meta.at("created_at").get<std::string>();
  out.snapshot = parse_scenario_text(read_file(dir / "snapshot.json"));
  out.ensemble = ensemble_from_json(json::parse(read_file(dir / "ensemble.json")));
  const json attrs = json::parse(read_file(dir / "attributes.json"));
  for (const auto& [name, table] : attrs.items()) {
    out.attributes[name] = attributes_from_json(table);
  }
  return out;
}

std::vector<std::string> ResultStore::list_runs() const {
  return list_ids(root_ / "runs", true, "");
}

fs::path ResultStore::export_path(const std::string& run_id, std::string_view extension) const {
  return root_ / "exports" / (run_id + "." + std::string(extension));
}

std::pair<std::string, fs::path> resolve_run_reference(const std::string& reference,
                                                       const fs::path& default_root) {
  const fs::path p(reference);
  std::error_code ec;
  if (fs::is_directory(p, ec) && fs::exists(p / "meta.json")) {
    const fs::path dir = fs::weakly_canonical(p);
    return {dir.filename().string(), dir.parent_path().parent_path()};
  }
  return {reference, default_root};
}

}  // namespace dss
