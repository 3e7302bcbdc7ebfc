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

#include "dss/server.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>
#include <stop_token>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dss/analysis.hpp"
#include "dss/decision.hpp"
#include "dss/error.hpp"
#include "dss/export.hpp"
#include "dss/result_store.hpp"
#include "dss/scenario_io.hpp"
#include "dss/version.hpp"

namespace dss {

using nlohmann::json;

std::string_view to_string(JobState state) noexcept {
  switch (state) {
    case JobState::Queued:
      return "queued";
    case JobState::Running:
      return "running";
    case JobState::Done:
      return "done";
    case JobState::Failed:
      return "failed";
  }
  return "?";
}

namespace {

// Carries an HTTP status out of a handler.
struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::string field_path;
};

[[noreturn]] void http_fail(int status, std::string code, std::string message,
                            std::string field_path = {}) {
  throw HttpError{status, std::move(code), std::move(message), std::move(field_path)};
}

json status_json(const JobStatus& s) {
  json j = {{"run_id", s.run_id}, {"state", std::string(to_string(s.state))}, {"progress", s.progress}};
  if (s.state == JobState::Failed) j["error"] = s.error;
  return j;
}

void send_json(httplib::Response& res, int status, json body, const std::string& run_digest) {
  body["engine_version"] = std::string(kEngineVersion);
  body["run_digest"] = run_digest.empty() ? json(nullptr) : json(run_digest);
  res.status = status;
  res.set_header("X-Engine-Version", std::string(kEngineVersion));
  if (!run_digest.empty()) res.set_header("X-Run-Digest", run_digest);
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    http_fail(400, "parse_error", std::string("request body is not valid JSON: ") + e.what());
  }
}

WeightVector parse_weights(const json& value, const std::string& path) {
  if (value.is_string()) {
    const auto name = value.get<std::string>();
    if (auto preset = weight_preset(name)) return *preset;
    // Also accept "k1,k2,k3".
    std::vector<double> k;
    std::stringstream ss(name);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        std::size_t used = 0;
        k.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        http_fail(422, "invalid_weights", "unknown preset or malformed weights '" + name + "'", path);
      }
    }
    return parse_weights(json(k), path);
  }
  if (!value.is_array()) http_fail(422, "invalid_weights", "expected a weight array or preset", path);
  std::vector<double> k;
  for (const auto& v : value) {
    if (!v.is_number()) http_fail(422, "invalid_weights", "weights must be numbers", path);
    k.push_back(v.get<double>());
  }
  if (k.size() != kAttributeCount) {
    http_fail(422, "invalid_weights", "expected " + std::to_string(kAttributeCount) + " weights", path);
  }
  try {
    return WeightVector(std::move(k));
  } catch (const ValidationError& e) {
    http_fail(422, "simplex_violation", e.reason(), path);
  }
}

json attributes_json(const AttributeVector& a) { return a.a; }

}  // namespace

struct Server::Impl {
  ServerConfig config;
  ResultStore store;
  httplib::Server http;
  int bound_port = -1;

  std::mutex mutex;
  std::condition_variable_any changed;
  std::map<std::string, JobStatus> jobs;
  std::deque<std::pair<std::string, Scenario>> queue;
  std::map<std::string, std::shared_ptr<const StoredRun>> cache;
  std::jthread worker;

  explicit Impl(ServerConfig cfg) : config(std::move(cfg)), store(config.data_dir) {
    routes();
    worker = std::jthread([this](std::stop_token st) { work(st); });
  }

  ~Impl() {
    http.stop();
    worker.request_stop();
    changed.notify_all();
  }

  void work(std::stop_token st) {
    while (true) {
      std::pair<std::string, Scenario> job;
      {
        std::unique_lock lock(mutex);
        if (!changed.wait(lock, st, [&] { return !queue.empty(); })) return;
        job = std::move(queue.front());
        queue.pop_front();
        jobs[job.first].state = JobState::Running;
      }
      changed.notify_all();
      const std::string& id = job.first;
      try {
        EnsembleOptions opts;
        opts.threads = config.simulation_threads;
        opts.on_progress = [this, &id](std::size_t done, std::size_t total) {
          std::lock_guard lock(mutex);
          auto& s = jobs[id];
          s.progress = std::max(s.progress, static_cast<double>(done) / static_cast<double>(total));
        };
        const EnsembleResult result = run_scenario(job.second, opts);
        store.put_run(job.second, result);
        std::lock_guard lock(mutex);
        jobs[id].state = JobState::Done;
        jobs[id].progress = 1.0;
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        jobs[id].state = JobState::Failed;
        jobs[id].error = e.what();
      }
      changed.notify_all();
    }
  }

  std::shared_ptr<const StoredRun> run(const std::string& id) {
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(id); it != cache.end()) return it->second;
    }
    if (!store.has_run(id)) http_fail(404, "not_found", "unknown run '" + id + "'");
    auto loaded = std::make_shared<const StoredRun>(store.get_run(id));
    std::lock_guard lock(mutex);
    return cache.emplace(id, std::move(loaded)).first->second;
  }

  static const std::vector<StrategyAttributes>& table_for(const StoredRun& r,
                                                          const std::string& age_filter) {
    const std::string key = age_filter.empty() ? "all" : age_filter;
    const auto it = r.attributes.find(key);
    if (it == r.attributes.end()) {
      http_fail(422, "unknown_age_filter", "unknown age filter '" + key + "'", "age_filter");
    }
    return it->second;
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const HttpError& e) {
        json err = {{"code", e.code}, {"message", e.message}};
        if (!e.field_path.empty()) err["field_path"] = e.field_path;
        send_json(res, e.status, {{"error", err}}, "");
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", {{"code", "internal"}, {"message", e.what()}}}}, "");
      }
    };
  }

  void routes() {
    http.Get("/api/health", guarded([](const auto&, auto& res) {
               send_json(res, 200, {{"status", "ok"}}, "");
             }));

    http.Get("/api/presets", guarded([](const auto&, auto& res) {
               json out = json::object();
               for (const auto& name : weight_preset_names()) {
                 const auto w = *weight_preset(name);
                 out[name] = std::vector<double>(w.values().begin(), w.values().end());
               }
               send_json(res, 200, {{"presets", out}, {"groupings", axis_grouping_keys()}}, "");
             }));

    http.Get("/api/scenarios", guarded([this](const auto&, auto& res) {
               send_json(res, 200, {{"scenarios", store.list_scenarios()}}, "");
             }));

    http.Post("/api/scenarios", guarded([this](const auto& req, auto& res) {
                Scenario sc;
                std::vector<std::string> warnings;
                try {
                  sc = parse_scenario_text(req.body, std::nullopt, &warnings);
                } catch (const ScenarioError& e) {
                  http_fail(400, "invalid_scenario", e.reason(), e.field_path());
                }
                const bool existed = store.has_scenario(scenario_digest(sc));
                const std::string id = store.put_scenario(sc);
                send_json(res, existed ? 200 : 201,
                          {{"scenario_id", id}, {"created", !existed}, {"warnings", warnings}}, "");
              }));

    http.Get("/api/scenarios/:id", guarded([this](const auto& req, auto& res) {
               const std::string id = req.path_params.at("id");
               if (!store.has_scenario(id)) http_fail(404, "not_found", "unknown scenario '" + id + "'");
               send_json(res, 200, {{"scenario_id", id}, {"scenario", scenario_to_json(store.get_scenario(id))}},
                         "");
             }));

    http.Get("/api/runs", guarded([this](const auto&, auto& res) {
               json runs = json::array();
               std::lock_guard lock(mutex);
               for (const auto& id : store.list_runs()) runs.push_back(id);
               for (const auto& [id, s] : jobs) {
                 if (s.state != JobState::Done) runs.push_back(id);
               }
               send_json(res, 200, {{"runs", runs}}, "");
             }));

    http.Post("/api/runs", guarded([this](const auto& req, auto& res) { start_run(req, res); }));

    http.Get("/api/runs/:id", guarded([this](const auto& req, auto& res) {
               const std::string id = req.path_params.at("id");
               send_json(res, 200, status_json(status_of(id)), id);
             }));

    http.Get("/api/runs/:id/summary", guarded([this](const auto& req, auto& res) {
               const auto r = run(req.path_params.at("id"));
               send_json(res, 200, summary(*r), r->id);
             }));

    http.Post("/api/runs/:id/score", guarded([this](const auto& req, auto& res) {
                const auto r = run(req.path_params.at("id"));
                const json body = parse_body(req);
                if (!body.contains("weights")) http_fail(422, "invalid_weights", "missing weights", "weights");
                const WeightVector w = parse_weights(body["weights"], "weights");
                const auto& table = table_for(*r, body.value("age_filter", ""));
                json ranking = json::array();
                for (const auto& s : rank(w, table)) {
                  ranking.push_back({{"strategy_id", s.strategy_id},
                                     {"score", s.score},
                                     {"contributions", s.contributions}});
                }
                send_json(res, 200,
                          {{"weights", std::vector<double>(w.values().begin(), w.values().end())},
                           {"ranking", ranking}},
                          r->id);
              }));

    http.Get("/api/runs/:id/pareto", guarded([this](const auto& req, auto& res) {
               const auto r = run(req.path_params.at("id"));
               const std::string key =
                   req.has_param("grouping") ? req.get_param_value("grouping") : std::string(kDefaultAxisGrouping);
               const auto grouping = axis_grouping(key);
               if (!grouping) http_fail(422, "unknown_grouping", "unknown axis grouping '" + key + "'", "grouping");
               const auto& table = table_for(*r, req.get_param_value("age_filter"));
               const auto points = group_points(table, *grouping);
               const auto front = pareto_front(points);
               json pts = json::array();
               for (const auto& p : points) {
                 const bool on = std::any_of(front.begin(), front.end(),
                                             [&](const ParetoPoint& f) { return f.id == p.id; });
                 pts.push_back({{"strategy_id", p.id}, {"x", p.x}, {"y", p.y}, {"on_front", on}});
               }
               json front_ids = json::array();
               for (const auto& f : front) front_ids.push_back(f.id);
               send_json(res, 200,
                         {{"grouping", key},
                          {"x_attributes", grouping->x_attributes},
                          {"y_attributes", grouping->y_attributes},
                          {"points", pts},
                          {"front", front_ids}},
                         r->id);
             }));

    const auto critical = guarded([this](const auto& req, auto& res) { critical_weight_route(req, res); });
    http.Post("/api/runs/:id/critical-weight", critical);
    http.Get("/api/runs/:id/critical-weight", critical);

    http.Get("/api/runs/:id/export", guarded([this](const auto& req, auto& res) {
               const auto r = run(req.path_params.at("id"));
               ExportFormat format = ExportFormat::Csv;
               try {
                 format = export_format_from_string(
                     req.has_param("format") ? req.get_param_value("format") : std::string("csv"));
               } catch (const ValidationError& e) {
                 http_fail(422, "unknown_format", e.reason(), "format");
               }
               std::optional<WeightVector> w;
               if (req.has_param("weights")) w = parse_weights(json(req.get_param_value("weights")), "weights");
               const auto rows = export_rows(r->ensemble, table_for(*r, req.get_param_value("age_filter")), w);
               res.status = 200;
               res.set_header("X-Engine-Version", std::string(kEngineVersion));
               res.set_header("X-Run-Digest", r->id);
               res.set_content(write_table(rows, format),
                               format == ExportFormat::Csv ? "text/csv" : "text/tab-separated-values");
             }));

    if (config.static_dir && std::filesystem::is_directory(*config.static_dir)) {
      http.set_mount_point("/", config.static_dir->string());
    }
  }

  JobStatus status_of(const std::string& id) {
    {
      std::lock_guard lock(mutex);
      if (auto it = jobs.find(id); it != jobs.end()) return it->second;
    }
    if (store.has_run(id)) return JobStatus{id, JobState::Done, 1.0, {}};
    http_fail(404, "not_found", "unknown run '" + id + "'");
  }

  void start_run(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("scenario_id") || !body["scenario_id"].is_string()) {
      http_fail(400, "invalid_request", "missing scenario_id", "scenario_id");
    }
    const std::string scenario_id = body["scenario_id"].get<std::string>();
    if (!store.has_scenario(scenario_id)) {
      http_fail(404, "not_found", "unknown scenario '" + scenario_id + "'");
    }
    Scenario snapshot = store.get_scenario(scenario_id);
    if (body.contains("seed")) {
      if (!body["seed"].is_number_unsigned()) http_fail(400, "invalid_request", "seed must be a nonnegative integer", "seed");
      snapshot.run.seed = body["seed"].get<std::uint64_t>();
    }
    if (body.contains("n_runs")) {
      if (!body["n_runs"].is_number_unsigned() || body["n_runs"].get<std::uint64_t>() < 1) {
        http_fail(400, "invalid_request", "n_runs must be a positive integer", "n_runs");
      }
      snapshot.run.n_runs = body["n_runs"].get<std::size_t>();
    }
    const std::string id = ResultStore::run_id(snapshot);
    {
      std::lock_guard lock(mutex);
      const auto it = jobs.find(id);
      const bool active = it != jobs.end() && it->second.state != JobState::Failed;
      if (active || store.has_run(id)) {
        JobStatus s = it != jobs.end() ? it->second : JobStatus{id, JobState::Done, 1.0, {}};
        json out = status_json(s);
        out["message"] = "identical run already exists";
        send_json(res, 409, out, id);
        return;
      }
      jobs[id] = JobStatus{id, JobState::Queued, 0.0, {}};
      queue.emplace_back(id, std::move(snapshot));
    }
    changed.notify_all();
    send_json(res, 202, status_json(JobStatus{id, JobState::Queued, 0.0, {}}), id);
  }

  void critical_weight_route(const httplib::Request& req, httplib::Response& res) {
    const auto r = run(req.path_params.at("id"));
    const json body = req.method == "POST" ? parse_body(req) : json::object();
    std::string age_filter = body.value("age_filter", std::string());
    if (req.has_param("age_filter")) age_filter = req.get_param_value("age_filter");
    const auto& table = table_for(*r, age_filter);

    Partition partition;
    if (body.contains("partition")) {
      const json& p = body["partition"];
      if (!p.is_object()) http_fail(422, "invalid_partition", "expected an object of strategy id -> bool", "partition");
      for (const auto& [id, v] : p.items()) {
        if (!v.is_boolean()) http_fail(422, "invalid_partition", "expected a boolean", "partition." + id);
        partition[id] = v.get<bool>();
      }
    } else {
      partition = default_partition(r->snapshot.strategies);
    }
    PartitionedTable sides;
    try {
      sides = split_by_partition(table, partition);
    } catch (const std::invalid_argument& e) {
      http_fail(422, "invalid_partition", e.what(), "partition");
    }
    if (sides.lockdown.empty() || sides.non_lockdown.empty()) {
      http_fail(422, "empty_partition", "both partition sides need at least one strategy", "partition");
    }
    const CriticalWeightResult cw = critical_weight(sides.lockdown, sides.non_lockdown);
    const char* kind = cw.kind == CrossingKind::Crossing     ? "crossing"
                       : cw.kind == CrossingKind::NoCrossing ? "no_crossing"
                                                             : "degenerate";
    json out = {{"kind", kind},
                {"lower", cw.lower},
                {"upper", cw.upper},
                {"best_lockdown", cw.best_lockdown},
                {"best_non_lockdown", cw.best_non_lockdown},
                {"winner_at_half", cw.winner_at_half},
                {"age_filter", age_filter.empty() ? "all" : age_filter}};
    out["c"] = cw.kind == CrossingKind::Crossing ? json(cw.c) : json(nullptr);
    out["ratio"] = cw.ratio ? json(*cw.ratio) : json(nullptr);
    send_json(res, 200, out, r->id);
  }

  static json summary(const StoredRun& r) {
    const auto& table = r.attributes.at("all");
    json strategies = json::array();
    for (const auto& s : r.ensemble.strategies) {
      json regimes = json::array();
      for (Regime g : s.example_weekly_regimes) regimes.push_back(std::string(to_string(g)));
      json attrs = nullptr;
      for (const auto& row : table) {
        if (row.strategy_id == s.strategy_id) attrs = attributes_json(row.attributes);
      }
      strategies.push_back({{"strategy_id", s.strategy_id},
                            {"expected_deaths_by_age", s.expected_deaths_by_age},
                            {"expected_total_deaths", s.expected_total_deaths()},
                            {"expected_weeks_in_regime", s.expected_weeks_in_regime},
                            {"attributes", attrs},
                            {"expected_daily_deaths", s.expected_daily_deaths},
                            {"example_daily_deaths", s.example_daily_deaths},
                            {"example_weekly_regimes", regimes}});
    }
    json filters = json::array();
    for (const auto& [name, _] : r.attributes) filters.push_back(name);
    return {{"run_id", r.id},
            {"scenario_id", r.scenario_id},
            {"created_at", r.created_at},
            {"seed", r.ensemble.provenance.seed},
            {"n_runs", r.ensemble.provenance.n_runs},
            {"age_groups", r.snapshot.age_groups},
            {"age_filters", filters},
            {"strategies", strategies}};
  }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() = default;

int Server::bind() {
  auto& cfg = impl_->config;
  if (cfg.port == 0) {
    impl_->bound_port = impl_->http.bind_to_any_port(cfg.host);
  } else {
    impl_->bound_port = impl_->http.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
  }
  if (impl_->bound_port < 0) {
    throw std::runtime_error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  }
  return impl_->bound_port;
}

void Server::listen() {
  if (impl_->bound_port < 0) throw std::logic_error("listen() before bind()");
  impl_->http.listen_after_bind();
}

void Server::stop() { impl_->http.stop(); }

JobStatus Server::wait(const std::string& run_id) {
  std::unique_lock lock(impl_->mutex);
  impl_->changed.wait(lock, [&] {
    const auto it = impl_->jobs.find(run_id);
    return it == impl_->jobs.end() || it->second.state == JobState::Done ||
           it->second.state == JobState::Failed;
  });
  const auto it = impl_->jobs.find(run_id);
  if (it != impl_->jobs.end()) return it->second;
  return JobStatus{run_id, impl_->store.has_run(run_id) ? JobState::Done : JobState::Failed, 1.0, {}};
}

}  // namespace dss
