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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "dss/export.hpp"
#include "dss/result_store.hpp"
#include "dss/scenario_io.hpp"

using namespace dss;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path default_path() { return fs::path(DSS_TEST_DATA_DIR) / "default_scenario.json"; }

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dss-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Default scenario, self-contained, shrunk for fast tests.
json small_doc() {
  json j = scenario_to_json(load_scenario(default_path()));
  j["run"]["n_runs"] = 3;
  j["run"]["horizon_weeks"] = 6;
  return j;
}

ScenarioError parse_error(const json& doc) {
  try {
    (void)parse_scenario(doc);
  } catch (const ScenarioError& e) {
    return e;
  }
  FAIL("expected ScenarioError");
  return ScenarioError(ScenarioErrorKind::Parse, "", "");
}

}  // namespace

TEST_CASE("default scenario loads with zero warnings") {
  std::vector<std::string> warnings;
  const Scenario sc = load_scenario(default_path(), &warnings);
  CHECK(warnings.empty());
  CHECK(sc.strategies.size() == 15);
  CHECK(sc.run.horizon_weeks == 40);
  CHECK(sc.run.n_runs == 1000);
  CHECK(sc.regions.size() == 12);
  CHECK(sc.age_groups.size() == 7);
  CHECK(sc.sources.size() == 5);
  for (const auto& s : sc.sources) CHECK_FALSE(s.citation.empty());
  CHECK(sc.run.p_log_mean == doctest::Approx(std::log(0.023)).epsilon(1e-15));
  CHECK(sc.attributes.cancer.life_years_per_week_full_suspension.size() == 7);
}

TEST_CASE("load-validate-dump idempotence") {
  const Scenario a = load_scenario(default_path());
  const Scenario b = parse_scenario_text(dump_scenario(a));
  CHECK(a == b);
  const Scenario c = parse_scenario_text(dump_scenario(b));
  CHECK(b == c);
  CHECK(scenario_digest(a) == scenario_digest(c));
  CHECK(scenario_digest(a).size() == 64);
}

TEST_CASE("weights are not scenario fields") {
  json j = small_doc();
  CHECK_FALSE(j.contains("weights"));
  CHECK_NOTHROW(parse_scenario(j));
}

TEST_CASE("easing fraction above 1 is rejected with its field path") {
  json j = small_doc();
  j["strategies"][1]["easing_fraction"] = 1.3;
  const auto e = parse_error(j);
  CHECK(e.kind() == ScenarioErrorKind::Invariant);
  CHECK(e.field_path() == "strategies[1].easing_fraction");
}

TEST_CASE("schema version mismatch") {
  json j = small_doc();
  j["schema_version"] = 99;
  const auto e = parse_error(j);
  CHECK(e.kind() == ScenarioErrorKind::SchemaVersion);
  CHECK(e.field_path() == "schema_version");
}

TEST_CASE("parse errors and field paths") {
  CHECK_THROWS_AS(parse_scenario_text("{not json"), ScenarioError);
  try {
    (void)parse_scenario_text("{not json");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioErrorKind::Parse);
  }
  json j = small_doc();
  j["populations"]["London"][2] = -5;
  CHECK(parse_error(j).field_path() == "populations.London[2]");
  j = small_doc();
  j["populations"].erase("Wales");
  CHECK(parse_error(j).field_path() == "populations.Wales");
  j = small_doc();
  j["run"]["seed_age_group"] = "teenagers";
  CHECK(parse_error(j).field_path() == "run.seed_age_group");
  j = small_doc();
  j["attributes"]["poverty"]["age_shares"]["children"] = 0.9;
  CHECK(parse_error(j).field_path() == "attributes.poverty.age_shares");
  j = small_doc();
  j["strategies"][0]["id"] = j["strategies"][1]["id"];
  CHECK(parse_error(j).field_path() == "strategies");
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST_CASE("unknown fields warn") {
  json j = small_doc();
  j["colour"] = "blue";
  j["run"]["speed"] = 3;
  std::vector<std::string> warnings;
  (void)parse_scenario(j, std::nullopt, &warnings);
  REQUIRE(warnings.size() == 2);
  CHECK(warnings[0].find("colour") != std::string::npos);
  CHECK(warnings[1].find("run.speed") != std::string::npos);
}

TEST_CASE("refs resolve relative to the citing file and are refused inline") {
  const fs::path dir = temp_dir("refs");
  fs::create_directories(dir / "t");
  std::ofstream(dir / "t" / "life.json")
      << R"({"table":"life","version":"1","source":"made up","data":[80,70,50,30,15,9,5]})";
  json j = small_doc();
  j["attributes"]["life_table"] = {{"$ref", "t/life.json"}};
  j["sources"] = json::array();
  std::ofstream(dir / "s.json") << j.dump();
  const Scenario sc = load_scenario(dir / "s.json");
  CHECK(sc.attributes.life_table.expected_remaining_years.front() == 80);
  REQUIRE(sc.sources.size() == 1);
  CHECK(sc.sources[0].citation == "made up");
  CHECK(parse_error(j).field_path() == "attributes.life_table");
  j["attributes"]["life_table"] = {{"$ref", "t/missing.json"}};
  CHECK_THROWS_AS(parse_scenario(j, dir), ScenarioError);
  fs::remove_all(dir);
}

TEST_CASE("keyed and positional forms are equivalent") {
  json j = small_doc();
  const Scenario a = parse_scenario(j);
  json life = json::object();
  for (std::size_t k = 0; k < a.age_groups.size(); ++k) {
    life[a.age_groups[k]] = a.attributes.life_table.expected_remaining_years[k];
  }
  j["attributes"]["life_table"] = life;
  j["run"]["initial_infections"] = 2;
  j["strategies"] = "standard";
  CHECK(parse_scenario(j) == a);
}

TEST_CASE("calibration from the shipped tables") {
  const Scenario sc = load_scenario(default_path());
  const Calibration c = calibrate(sc);
  CHECK(std::abs(c.total_rate - 0.101466) <= 1e-6);
  CHECK(c.transmission_probability >= 0.020);
  CHECK(c.transmission_probability <= 0.026);
  for (std::size_t a = 0; a < c.rates.size(); ++a) {
    CHECK(c.rates[a].lambda / (c.rates[a].gamma + c.rates[a].lambda) ==
          doctest::Approx(sc.calibration.ifr[a]).epsilon(1e-15));
  }
}

TEST_CASE("export round trip and cross-checks") {
  const Scenario sc = parse_scenario(small_doc());
  const EnsembleResult e = run_scenario(sc);
  const auto table = attribute_table(e, sc.attributes);
  const auto w = *weight_preset("custom-0.45");
  const auto rows = export_rows(e, table, w);
  for (ExportFormat f : {ExportFormat::Csv, ExportFormat::Tsv}) {
    const std::string text = write_table(rows, f);
    CHECK(std::count(text.begin(), text.end(), '\n') == 16);
    CHECK(read_table(text, f) == rows);
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(*rows[k].score == expected_utility(w, table[k].attributes));
  }
  const auto unscored = export_rows(e, table, std::nullopt);
  CHECK(read_table(write_table(unscored, ExportFormat::Csv), ExportFormat::Csv) == unscored);
  CHECK(export_format_from_string("table") == ExportFormat::Tsv);
  CHECK_THROWS_AS(export_format_from_string("xlsx"), ValidationError);
  CHECK_THROWS_AS(read_table("a,b\n1,2\n", ExportFormat::Csv), ValidationError);
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("result store round trip and re-execution") {
  const fs::path dir = temp_dir("store");
  ResultStore store(dir);
  const Scenario sc = parse_scenario(small_doc());
  const EnsembleResult e = run_scenario(sc);
  CHECK(ensemble_from_json(json::parse(ensemble_to_json(e).dump())) == e);

  const std::string sid = store.put_scenario(sc);
  CHECK(sid == scenario_digest(sc));
  CHECK(store.put_scenario(sc) == sid);
  CHECK(store.get_scenario(sid) == sc);

  const std::string id = store.put_run(sc, e);
  CHECK(id == ResultStore::run_id(sc));
  CHECK(store.has_run(id));
  const auto before = fs::last_write_time(store.run_dir(id) / "ensemble.json");
  CHECK(store.put_run(sc, e) == id);
  CHECK(fs::last_write_time(store.run_dir(id) / "ensemble.json") == before);

  const StoredRun r = store.get_run(id);
  CHECK(r.ensemble == e);
  CHECK(r.snapshot == sc);
  CHECK(r.attributes.count("all") == 1);
  CHECK(r.attributes.count("under_45") == 1);
  CHECK(r.attributes.at("all") == attribute_table(e, sc.attributes));
  // Re-executing the snapshot reproduces the stored result bit for bit.
  CHECK(run_scenario(r.snapshot) == r.ensemble);

  Scenario other = sc;
  other.run.seed += 1;
  CHECK(ResultStore::run_id(other) != id);
  CHECK(store.list_runs() == std::vector<std::string>{id});
  CHECK_THROWS_AS(store.get_run("deadbeef"), NotFoundError);
  CHECK_THROWS_AS(store.get_run("../etc"), NotFoundError);

  const auto [rid, root] = resolve_run_reference(store.run_dir(id).string(), "elsewhere");
  CHECK(rid == id);
  CHECK(fs::equivalent(root, dir));
  fs::remove_all(dir);
}

TEST_CASE("null epidemic yields zero death attributes") {
  json j = small_doc();
  j["run"]["initial_infections"] = 0;
  const Scenario sc = parse_scenario(j);
  const auto e = run_scenario(sc);
  for (const auto& row : attribute_table(e, sc.attributes)) CHECK(row.attributes.a[0] == 0.0);
}
