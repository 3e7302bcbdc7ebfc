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

#include "dss/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dss/digest.hpp"

namespace dss {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason,
                       ScenarioErrorKind kind = ScenarioErrorKind::Invariant) {
  throw ScenarioError(kind, path, reason);
}

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

// Read-only cursor into the document that remembers where it is.
class Node {
 public:
  Node(const json& j, std::string path, std::vector<std::string>* warnings)
      : j_(&j), path_(std::move(path)), warnings_(warnings) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }
  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }
  bool is_string() const { return j_->is_string(); }
  bool is_number() const { return j_->is_number(); }
  bool is_null() const { return j_->is_null(); }

  std::optional<Node> find(std::string_view key) const {
    require_object();
    const auto it = j_->find(key);
    if (it == j_->end()) return std::nullopt;
    return Node(*it, join_path(path_, key), warnings_);
  }

  Node at(std::string_view key) const {
    auto n = find(key);
    if (!n) fail(join_path(path_, key), "missing required field");
    return *n;
  }

  Node at(std::size_t i) const {
    return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]", warnings_);
  }

  std::size_t size() const {
    if (!j_->is_array()) fail(path_, "expected an array");
    return j_->size();
  }

  void require_object() const {
    if (!j_->is_object()) fail(path_, "expected an object");
  }

  // Warns about keys outside `known`.
  void known_fields(std::initializer_list<std::string_view> known) const {
    require_object();
    if (!warnings_) return;
    for (const auto& [key, _] : j_->items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        warnings_->push_back(join_path(path_, key) + ": unknown field ignored");
      }
    }
  }

  double number() const {
    if (!j_->is_number()) fail(path_, "expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail(path_, "expected a finite number");
    return v;
  }

  long long integer() const {
    if (j_->is_number_integer()) return j_->get<long long>();
    const double v = number();
    if (std::floor(v) != v) fail(path_, "expected an integer");
    return static_cast<long long>(v);
  }

  std::uint64_t uint64() const {
    if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
    const long long v = integer();
    if (v < 0) fail(path_, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  }

  std::string string() const {
    if (!j_->is_string()) fail(path_, "expected a string");
    return j_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).string();
    return out;
  }

  // A per-name vector: either an array in `names` order or an object keyed
  // by name (every name required, no extras).
  std::vector<double> keyed_numbers(const std::vector<std::string>& names) const {
    if (j_->is_array()) {
      auto v = numbers();
      if (v.size() != names.size()) {
        fail(path_, "expected " + std::to_string(names.size()) + " entries");
      }
      return v;
    }
    require_object();
    for (const auto& [key, _] : j_->items()) {
      if (std::find(names.begin(), names.end(), key) == names.end()) {
        fail(join_path(path_, key), "unknown key");
      }
    }
    std::vector<double> out;
    out.reserve(names.size());
    for (const auto& name : names) out.push_back(at(name).number());
    return out;
  }

 private:
  const json* j_;
  std::string path_;
  std::vector<std::string>* warnings_;
};

json read_json_file(const std::filesystem::path& path, const std::string& field_path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError(ScenarioErrorKind::Parse, field_path,
                        "file not found or unreadable: " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioErrorKind::Parse, field_path,
                        "parse error in " + path.string() + ": " + e.what());
  }
}

void resolve_refs(json& node, const std::optional<std::filesystem::path>& base_dir,
                  const std::string& path, std::vector<DataSource>& sources) {
  if (node.is_object()) {
    const auto ref = node.find("$ref");
    if (ref != node.end()) {
      if (!base_dir) fail(path, "\"$ref\" is not allowed here; inline the table");
      if (!ref->is_string() || node.size() != 1) {
        fail(path, "a \"$ref\" object must hold exactly one string");
      }
      const std::filesystem::path file = *base_dir / ref->get<std::string>();
      json table = read_json_file(file, path);
      if (!table.is_object() || !table.contains("data")) {
        fail(path, "referenced table " + file.string() + " has no \"data\" member");
      }
      DataSource src{table.value("table", ref->get<std::string>()), table.value("version", ""),
                     table.value("source", "")};
      if (std::find(sources.begin(), sources.end(), src) == sources.end()) {
        sources.push_back(std::move(src));
      }
      json data = std::move(table["data"]);
      resolve_refs(data, file.parent_path(), path, sources);
      node = std::move(data);
      return;
    }
    for (auto& [key, child] : node.items()) resolve_refs(child, base_dir, join_path(path, key), sources);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      resolve_refs(node[i], base_dir, path + "[" + std::to_string(i) + "]", sources);
    }
  }
}

Regime read_regime(const Node& n) {
  try {
    return regime_from_string(n.string());
  } catch (const std::invalid_argument& e) {
    fail(n.path(), e.what());
  }
}

std::optional<double> optional_number(const Node& parent, std::string_view key) {
  auto n = parent.find(key);
  if (!n || n->is_null()) return std::nullopt;
  return n->number();
}

Strategy read_strategy(const Node& n) {
  n.known_fields({"id", "initial_target", "lockdown_threshold", "easing_fraction",
                  "tightening_rise"});
  Strategy s;
  s.id = n.at("id").string();
  s.initial_target = read_regime(n.at("initial_target"));
  s.lockdown_threshold = n.at("lockdown_threshold").number();
  s.easing_fraction = optional_number(n, "easing_fraction");
  s.tightening_rise = optional_number(n, "tightening_rise");
  return s;
}

json strategy_to_json(const Strategy& s) {
  json j = {{"id", s.id},
            {"initial_target", std::string(to_string(s.initial_target))},
            {"lockdown_threshold", s.lockdown_threshold}};
  if (s.easing_fraction) j["easing_fraction"] = *s.easing_fraction;
  if (s.tightening_rise) j["tightening_rise"] = *s.tightening_rise;
  return j;
}

std::size_t index_in(const std::vector<std::string>& names, const std::string& name,
                     const std::string& path) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(path, "unknown name '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// {"source band": {"target": fraction, ...}, ...} with `source_order` rows.
BandMapping read_mapping(const Node& n, const std::vector<std::string>& source_order,
                         const std::vector<std::string>& targets) {
  n.require_object();
  BandMapping m;
  m.source_bands = source_order;
  for (const auto& [key, _] : n.raw().items()) {
    if (std::find(source_order.begin(), source_order.end(), key) == source_order.end()) {
      fail(join_path(n.path(), key), "unknown source band");
    }
  }
  for (const auto& source : source_order) {
    const Node row = n.at(source);
    row.require_object();
    std::vector<double> fractions(targets.size(), 0.0);
    for (const auto& [target, value] : row.raw().items()) {
      const std::string path = join_path(row.path(), target);
      fractions[index_in(targets, target, path)] = Node(value, path, nullptr).number();
    }
    m.fractions.push_back(std::move(fractions));
  }
  return m;
}

json mapping_to_json(const BandMapping& m, const std::vector<std::string>& targets) {
  json j = json::object();
  for (std::size_t s = 0; s < m.source_bands.size(); ++s) {
    json row = json::object();
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (m.fractions[s][t] != 0.0) row[targets[t]] = m.fractions[s][t];
    }
    j[m.source_bands[s]] = std::move(row);
  }
  return j;
}

std::vector<std::string> poverty_band_names() {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < kPovertyBandCount; ++b) {
    out.emplace_back(to_string(static_cast<PovertyBand>(b)));
  }
  return out;
}

void read_run(const Node& n, const Scenario& sc, RunConfig& run) {
  n.known_fields({"n_runs", "horizon_weeks", "seed", "p_log_mean", "p_median", "p_log_sd",
                  "initial_infections", "seed_age_group"});
  if (auto v = n.find("n_runs")) {
    const long long runs = v->integer();
    if (runs < 1) fail(v->path(), "must be >= 1");
    run.n_runs = static_cast<std::size_t>(runs);
  }
  if (auto v = n.find("horizon_weeks")) {
    const long long weeks = v->integer();
    if (weeks < 1 || weeks > 100000) fail(v->path(), "must be in [1, 100000]");
    run.horizon_weeks = static_cast<int>(weeks);
  }
  if (auto v = n.find("seed")) run.seed = v->uint64();
  const auto log_mean = n.find("p_log_mean");
  const auto median = n.find("p_median");
  if (log_mean && median) fail(n.path(), "give either p_log_mean or p_median, not both");
  if (log_mean) run.p_log_mean = log_mean->number();
  if (median) {
    const double m = median->number();
    if (!(m > 0.0)) fail(median->path(), "must be positive");
    run.p_log_mean = std::log(m);
  }
  if (auto v = n.find("p_log_sd")) run.p_log_sd = v->number();

  const Node inf = n.at("initial_infections");
  if (inf.is_number()) {
    run.initial_infections.assign(sc.regions.size(), inf.number());
  } else {
    run.initial_infections = inf.keyed_numbers(sc.regions);
  }
  const Node seed_age = n.at("seed_age_group");
  run.seed_age_group = index_in(sc.age_groups, seed_age.string(), seed_age.path());
}

void read_attributes(const Node& n, Scenario& sc) {
  n.known_fields({"life_table", "cancer", "poverty"});
  AttributeModels& m = sc.attributes;
  m.life_table.expected_remaining_years = n.at("life_table").keyed_numbers(sc.age_groups);

  const Node cancer = n.at("cancer");
  cancer.known_fields({"partial_factor", "life_years_per_week"});
  if (auto v = cancer.find("partial_factor")) m.cancer.partial_factor = v->number();
  const Node slopes = cancer.at("life_years_per_week");
  if (slopes.is_object() && slopes.find("source_bands")) {
    slopes.known_fields({"source_bands", "values", "mapping"});
    const auto bands = slopes.at("source_bands").strings();
    const auto values = slopes.at("values").keyed_numbers(bands);
    const BandMapping mapping = read_mapping(slopes.at("mapping"), bands, sc.age_groups);
    try {
      m.cancer.life_years_per_week_full_suspension =
          remap_age_bands(values, mapping, sc.age_groups.size());
    } catch (const ValidationError& e) {
      fail(join_path(slopes.path(), "mapping"), e.what());
    }
  } else {
    m.cancer.life_years_per_week_full_suspension = slopes.keyed_numbers(sc.age_groups);
  }

  const Node pov = n.at("poverty");
  pov.known_fields({"total_poverty_years", "poverty_years_per_life_year", "age_shares",
                    "reference_lockdown_weeks", "partial_factor", "band_age_groups"});
  if (auto v = pov.find("total_poverty_years")) m.poverty.total_poverty_years = v->number();
  if (auto v = pov.find("poverty_years_per_life_year")) {
    m.poverty.poverty_years_per_life_year = v->number();
  }
  const auto bands = poverty_band_names();
  if (auto v = pov.find("age_shares")) {
    const auto shares = v->keyed_numbers(bands);
    std::copy(shares.begin(), shares.end(), m.poverty.age_shares.begin());
  }
  if (auto v = pov.find("reference_lockdown_weeks")) {
    m.poverty.reference_lockdown_weeks = v->number();
  }
  if (auto v = pov.find("partial_factor")) m.poverty.partial_factor = v->number();
  m.poverty_band_ages = read_mapping(pov.at("band_age_groups"), bands, sc.age_groups);
}

Scenario read_scenario(const Node& root) {
  root.known_fields({"schema_version", "name", "description", "regions", "age_groups",
                     "populations", "calibration", "contacts", "strategies", "run",
                     "attributes", "age_filters", "sources"});
  Scenario sc;
  const Node version = root.at("schema_version");
  if (version.integer() != kScenarioSchemaVersion) {
    fail(version.path(),
         "unsupported schema version " + version.raw().dump() + " (expected " +
             std::to_string(kScenarioSchemaVersion) + ")",
         ScenarioErrorKind::SchemaVersion);
  }
  sc.schema_version = kScenarioSchemaVersion;
  sc.name = root.at("name").string();
  if (auto d = root.find("description")) sc.description = d->string();
  sc.regions = root.at("regions").strings();
  sc.age_groups = root.at("age_groups").strings();

  const Node pops = root.at("populations");
  pops.require_object();
  for (const auto& [key, _] : pops.raw().items()) {
    index_in(sc.regions, key, join_path(pops.path(), key));
  }
  for (const auto& region : sc.regions) {
    sc.populations.push_back(pops.at(region).keyed_numbers(sc.age_groups));
  }

  const Node cal = root.at("calibration");
  cal.known_fields({"ifr", "recovery_window", "residual", "r0", "baseline_contacts"});
  sc.calibration.ifr = cal.at("ifr").keyed_numbers(sc.age_groups);
  if (auto v = cal.find("recovery_window")) {
    const long long w = v->integer();
    if (w < 1 || w > std::numeric_limits<int>::max()) fail(v->path(), "must be >= 1");
    sc.calibration.recovery_window = static_cast<int>(w);
  }
  if (auto v = cal.find("residual")) sc.calibration.residual = v->number();
  if (auto v = cal.find("r0")) sc.calibration.r0 = v->number();
  sc.calibration.baseline_contacts = cal.at("baseline_contacts").keyed_numbers(sc.age_groups);
  sc.calibration.population_weights.assign(sc.age_groups.size(), 0.0);
  for (const auto& row : sc.populations) {
    for (std::size_t a = 0; a < row.size(); ++a) sc.calibration.population_weights[a] += row[a];
  }

  if (auto c = root.find("contacts")) {
    c->known_fields({"partial_factor", "complete_contacts", "overrides"});
    if (auto v = c->find("partial_factor")) sc.contact_rules.partial_factor = v->number();
    if (auto v = c->find("complete_contacts")) sc.contact_rules.complete_contacts = v->number();
    if (auto o = c->find("overrides")) {
      o->require_object();
      for (const auto& [key, value] : o->raw().items()) {
        const std::string path = join_path(o->path(), key);
        const Regime r = read_regime(Node(json(key), path, nullptr));
        sc.contact_rules.overrides[index_of(r)] = Node(value, path, nullptr).keyed_numbers(sc.age_groups);
      }
    }
  }

  const Node strategies = root.at("strategies");
  if (strategies.is_string()) {
    if (strategies.string() != "standard") fail(strategies.path(), "expected \"standard\" or a list");
    sc.strategies = enumerate_standard_strategies();
  } else {
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      sc.strategies.push_back(read_strategy(strategies.at(i)));
    }
  }

  read_run(root.at("run"), sc, sc.run);
  read_attributes(root.at("attributes"), sc);

  if (auto f = root.find("age_filters")) {
    f->require_object();
    for (const auto& [key, _] : f->raw().items()) {
      const Node list = f->at(key);
      auto names = list.strings();
      for (std::size_t i = 0; i < names.size(); ++i) {
        index_in(sc.age_groups, names[i], list.path() + "[" + std::to_string(i) + "]");
      }
      sc.age_filters[key] = std::move(names);
    }
  }

  if (auto s = root.find("sources")) {
    for (std::size_t i = 0; i < s->size(); ++i) {
      const Node e = s->at(i);
      e.known_fields({"table", "version", "source"});
      DataSource src{e.at("table").string(), e.find("version") ? e.at("version").string() : "",
                     e.find("source") ? e.at("source").string() : ""};
      sc.sources.push_back(std::move(src));
    }
  }
  return sc;
}

void require(bool ok, const std::string& path, const std::string& reason) {
  if (!ok) fail(path, reason);
}

bool unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

}  // namespace

std::size_t Scenario::age_index(std::string_view age_group) const {
  const auto it = std::find(age_groups.begin(), age_groups.end(), age_group);
  if (it == age_groups.end()) throw NotFoundError("unknown age group '" + std::string(age_group) + "'");
  return static_cast<std::size_t>(it - age_groups.begin());
}

AgeMask Scenario::age_mask(std::string_view filter) const {
  if (filter.empty() || filter == "all") return {};
  const auto it = age_filters.find(std::string(filter));
  if (it == age_filters.end()) throw NotFoundError("unknown age filter '" + std::string(filter) + "'");
  AgeMask mask(age_groups.size(), false);
  for (const auto& name : it->second) mask[age_index(name)] = true;
  return mask;
}

void validate_scenario(const Scenario& sc) {
  require(!sc.name.empty(), "name", "must be non-empty");
  require(!sc.regions.empty(), "regions", "at least one region required");
  require(!sc.age_groups.empty(), "age_groups", "at least one age group required");
  require(unique(sc.regions), "regions", "duplicate region name");
  require(unique(sc.age_groups), "age_groups", "duplicate age group name");
  require(sc.populations.size() == sc.regions.size(), "populations", "one row per region");
  for (std::size_t i = 0; i < sc.populations.size(); ++i) {
    const std::string row = "populations." + sc.regions[i];
    require(sc.populations[i].size() == sc.age_groups.size(), row, "one entry per age group");
    double total = 0.0;
    for (std::size_t a = 0; a < sc.populations[i].size(); ++a) {
      require(std::isfinite(sc.populations[i][a]) && sc.populations[i][a] >= 0.0,
              row + "[" + std::to_string(a) + "]", "must be nonnegative");
      total += sc.populations[i][a];
    }
    require(total > 0.0, row, "region population must be positive");
  }

  const auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const ScenarioError&) {
      throw;
    } catch (const ValidationError& e) {
      fail(e.field_path(), e.reason());
    }
  };
  const std::size_t ages = sc.age_groups.size();
  const auto& cal = sc.calibration;
  require(cal.ifr.size() == ages, "calibration.ifr", "one entry per age group");
  for (std::size_t a = 0; a < ages; ++a) {
    require(cal.ifr[a] >= 0.0 && cal.ifr[a] < 1.0,
            "calibration.ifr[" + std::to_string(a) + "]", "must lie in [0, 1)");
  }
  require(cal.recovery_window >= 1, "calibration.recovery_window", "must be >= 1");
  require(cal.residual > 0.0 && cal.residual < 1.0, "calibration.residual", "must lie in (0, 1)");
  require(cal.r0 > 0.0, "calibration.r0", "must be positive");
  require(cal.baseline_contacts.size() == ages, "calibration.baseline_contacts",
          "one entry per age group");
  for (std::size_t a = 0; a < ages; ++a) {
    require(cal.baseline_contacts[a] >= 0.0,
            "calibration.baseline_contacts[" + std::to_string(a) + "]", "must be nonnegative");
  }

  require(sc.contact_rules.partial_factor >= 0.0, "contacts.partial_factor", "must be nonnegative");
  require(sc.contact_rules.complete_contacts >= 0.0, "contacts.complete_contacts",
          "must be nonnegative");
  for (Regime r : kAllRegimes) {
    const auto& o = sc.contact_rules.overrides[index_of(r)];
    const std::string path = "contacts.overrides." + std::string(to_string(r));
    require(o.empty() || o.size() == ages, path, "one entry per age group");
    for (double v : o) require(v >= 0.0, path, "must be nonnegative");
  }

  require(!sc.strategies.empty(), "strategies", "at least one strategy required");
  std::vector<std::string> ids;
  for (std::size_t s = 0; s < sc.strategies.size(); ++s) {
    wrap([&] { sc.strategies[s].validate("strategies[" + std::to_string(s) + "]"); });
    ids.push_back(sc.strategies[s].id);
  }
  require(unique(ids), "strategies", "duplicate strategy id");

  wrap([&] { sc.run.validate(); });
  require(sc.run.initial_infections.size() == sc.regions.size(), "run.initial_infections",
          "one entry per region");
  require(sc.run.seed_age_group < ages, "run.seed_age_group", "unknown age group");
  for (std::size_t i = 0; i < sc.regions.size(); ++i) {
    require(sc.run.initial_infections[i] <= sc.populations[i][sc.run.seed_age_group],
            "run.initial_infections." + sc.regions[i],
            "exceeds the population of the seeded age group");
  }

  try {
    sc.attributes.validate(ages);
  } catch (const ValidationError& e) {
    const std::string& path = e.field_path();
    fail(path.rfind("attributes.", 0) == 0 ? path : "attributes." + path, e.reason());
  }
  for (const auto& [name, groups] : sc.age_filters) {
    for (const auto& g : groups) {
      require(std::find(sc.age_groups.begin(), sc.age_groups.end(), g) != sc.age_groups.end(),
              "age_filters." + name, "unknown age group '" + g + "'");
    }
  }

  // Derived quantities must be admissible too.
  const Calibration c = calibrate(sc);
  require(c.transmission_probability <= 1.0, "calibration",
          "calibrated transmission probability exceeds 1");
}

Scenario parse_scenario(const json& doc, const std::optional<std::filesystem::path>& base_dir,
                        std::vector<std::string>* warnings) {
  json resolved = doc;
  std::vector<DataSource> ref_sources;
  resolve_refs(resolved, base_dir, "", ref_sources);
  Scenario sc = read_scenario(Node(resolved, "", warnings));
  for (auto& src : ref_sources) {
    if (std::find(sc.sources.begin(), sc.sources.end(), src) == sc.sources.end()) {
      sc.sources.push_back(std::move(src));
    }
  }
  validate_scenario(sc);
  return sc;
}

Scenario parse_scenario_text(std::string_view text,
                             const std::optional<std::filesystem::path>& base_dir,
                             std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioErrorKind::Parse, "", std::string("parse error: ") + e.what());
  }
  return parse_scenario(doc, base_dir, warnings);
}

Scenario load_scenario(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  if (!std::filesystem::exists(path)) {
    throw ScenarioError(ScenarioErrorKind::Parse, "", "file not found: " + path.string());
  }
  const json doc = read_json_file(path, "");
  return parse_scenario(doc, path.parent_path(), warnings);
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = sc.schema_version;
  j["name"] = sc.name;
  j["description"] = sc.description;
  j["regions"] = sc.regions;
  j["age_groups"] = sc.age_groups;
  json pops = json::object();
  for (std::size_t i = 0; i < sc.regions.size(); ++i) pops[sc.regions[i]] = sc.populations[i];
  j["populations"] = std::move(pops);
  j["calibration"] = {{"ifr", sc.calibration.ifr},
                      {"recovery_window", sc.calibration.recovery_window},
                      {"residual", sc.calibration.residual},
                      {"r0", sc.calibration.r0},
                      {"baseline_contacts", sc.calibration.baseline_contacts}};
  json contacts = {{"partial_factor", sc.contact_rules.partial_factor},
                   {"complete_contacts", sc.contact_rules.complete_contacts}};
  json overrides = json::object();
  for (Regime r : kAllRegimes) {
    const auto& o = sc.contact_rules.overrides[index_of(r)];
    if (!o.empty()) overrides[std::string(to_string(r))] = o;
  }
  if (!overrides.empty()) contacts["overrides"] = std::move(overrides);
  j["contacts"] = std::move(contacts);

  json strategies = json::array();
  for (const auto& s : sc.strategies) strategies.push_back(strategy_to_json(s));
  j["strategies"] = std::move(strategies);

  json infections = json::object();
  for (std::size_t i = 0; i < sc.regions.size(); ++i) {
    infections[sc.regions[i]] = sc.run.initial_infections.at(i);
  }
  j["run"] = {{"n_runs", sc.run.n_runs},
              {"horizon_weeks", sc.run.horizon_weeks},
              {"seed", sc.run.seed},
              {"p_log_mean", sc.run.p_log_mean},
              {"p_log_sd", sc.run.p_log_sd},
              {"initial_infections", std::move(infections)},
              {"seed_age_group", sc.age_groups.at(sc.run.seed_age_group)}};

  const auto& m = sc.attributes;
  const auto bands = poverty_band_names();
  json shares = json::object();
  for (std::size_t b = 0; b < kPovertyBandCount; ++b) shares[bands[b]] = m.poverty.age_shares[b];
  j["attributes"] = {
      {"life_table", m.life_table.expected_remaining_years},
      {"cancer",
       {{"partial_factor", m.cancer.partial_factor},
        {"life_years_per_week", m.cancer.life_years_per_week_full_suspension}}},
      {"poverty",
       {{"total_poverty_years", m.poverty.total_poverty_years},
        {"poverty_years_per_life_year", m.poverty.poverty_years_per_life_year},
        {"age_shares", std::move(shares)},
        {"reference_lockdown_weeks", m.poverty.reference_lockdown_weeks},
        {"partial_factor", m.poverty.partial_factor},
        {"band_age_groups", mapping_to_json(m.poverty_band_ages, sc.age_groups)}}}};

  json filters = json::object();
  for (const auto& [name, groups] : sc.age_filters) filters[name] = groups;
  j["age_filters"] = std::move(filters);

  json sources = json::array();
  for (const auto& s : sc.sources) {
    sources.push_back({{"table", s.table}, {"version", s.version}, {"source", s.citation}});
  }
  j["sources"] = std::move(sources);
  return j;
}

std::string dump_scenario(const Scenario& scenario) { return scenario_to_json(scenario).dump(2); }

std::string scenario_digest(const Scenario& scenario) {
  return sha256_hex(scenario_to_json(scenario).dump());
}

Calibration calibrate(const Scenario& sc) {
  Calibration out;
  out.total_rate = calibrate_removal_rate(sc.calibration.recovery_window, sc.calibration.residual);
  out.rates.reserve(sc.calibration.ifr.size());
  for (double ifr : sc.calibration.ifr) out.rates.push_back(split_rates(ifr, out.total_rate));
  out.transmission_probability = calibrate_transmission_probability(sc.calibration, out.total_rate);
  return out;
}

EpiModel build_epi_model(const Scenario& sc) {
  const Calibration cal = calibrate(sc);
  EpiModel model;
  model.populations = sc.populations;
  for (const auto& r : cal.rates) {
    model.gamma.push_back(r.gamma);
    model.lambda.push_back(r.lambda);
  }
  for (Regime r : kAllRegimes) {
    model.contacts[index_of(r)] =
        regime_contacts(sc.calibration.baseline_contacts, r, sc.contact_rules);
  }
  return model;
}

EnsembleResult run_scenario(const Scenario& scenario, const EnsembleOptions& options) {
  EnsembleOptions opts = options;
  if (opts.config_hash.empty()) opts.config_hash = scenario_digest(scenario);
  return run_ensemble(scenario.strategies, scenario.run, build_epi_model(scenario), opts);
}

}  // namespace dss
