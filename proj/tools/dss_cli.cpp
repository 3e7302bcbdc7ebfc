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

// dss: run ensembles, score, export and serve from the command line.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dss/analysis.hpp"
#include "dss/decision.hpp"
#include "dss/error.hpp"
#include "dss/export.hpp"
#include "dss/result_store.hpp"
#include "dss/scenario_io.hpp"
#include "dss/server.hpp"
#include "dss/version.hpp"

#ifndef DSS_SHARE_DIR
#define DSS_SHARE_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace dss;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// "default" / "default-scenario" name the bundled scenario.
fs::path scenario_path(const std::string& arg) {
  if (arg == "default" || arg == "default-scenario") {
    return fs::path(env_or("DSS_SHARE_DIR", DSS_SHARE_DIR)) / "default_scenario.json";
  }
  return arg;
}

WeightVector parse_weights(const std::string& text) {
  if (auto preset = weight_preset(text)) return *preset;
  std::vector<double> k;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) {
      throw ValidationError("weights", "'" + text + "' is neither a preset nor k1,k2,k3");
    }
    k.push_back(v);
  }
  if (k.size() != kAttributeCount) throw ValidationError("weights", "expected three weights");
  return WeightVector(std::move(k));
}

struct RunRef {
  fs::path root;
  StoredRun run;
};

RunRef open_run(const std::string& reference, const std::string& data_dir) {
  auto [id, root] = resolve_run_reference(reference, data_dir);
  StoredRun run = ResultStore(root).get_run(id);
  return {root, std::move(run)};
}

const std::vector<StrategyAttributes>& table_for(const StoredRun& run, const std::string& filter) {
  const auto it = run.attributes.find(filter.empty() ? "all" : filter);
  if (it == run.attributes.end()) throw ValidationError("age-filter", "unknown age filter '" + filter + "'");
  return it->second;
}

std::string fmt(double v, int precision = 0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

void print_rows(const std::vector<ExportRow>& rows, bool machine) {
  if (machine) {
    std::cout << write_table(rows, ExportFormat::Tsv);
    return;
  }
  std::printf("%-8s %12s %12s %12s %7s %7s %7s %14s\n", "strategy", "a1_covid", "a2_cancer",
              "a3_poverty", "wk_r0", "wk_r1", "wk_r2", "score");
  for (const auto& r : rows) {
    std::printf("%-8s %12s %12s %12s %7s %7s %7s %14s\n", r.strategy_id.c_str(),
                fmt(r.attributes[0]).c_str(), fmt(r.attributes[1]).c_str(),
                fmt(r.attributes[2]).c_str(), fmt(r.weeks[0], 2).c_str(), fmt(r.weeks[1], 2).c_str(),
                fmt(r.weeks[2], 2).c_str(), r.score ? fmt(*r.score).c_str() : "-");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Countermeasure decision support: SIRD ensembles scored by multi-attribute utility"};
  app.set_version_flag("--version", std::string(kEngineVersion));
  app.require_subcommand(1);

  std::string data_dir = env_or("DSS_DATA_DIR", "dss-data");
  bool machine = false;
  app.add_option("--data-dir", data_dir, "Result store directory (env DSS_DATA_DIR)");
  app.add_flag("--machine", machine, "Print tab-separated export format instead of tables");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a scenario's ensemble and store the result");
  std::string scenario_arg;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_runs;
  unsigned threads = 0;
  run_cmd->add_option("scenario", scenario_arg, "Scenario file, or 'default'")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--runs", n_runs, "Override the number of Monte Carlo runs")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", data_dir, "Result store directory");
  run_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Load a scenario and report warnings");
  validate_cmd->add_option("scenario", scenario_arg, "Scenario file, or 'default'")->required();

  // score
  auto* score_cmd = app.add_subcommand("score", "Rank a stored run's strategies under weights");
  std::string run_arg, weights_arg = "equal", age_filter;
  score_cmd->add_option("run", run_arg, "Run id or run directory")->required();
  score_cmd->add_option("--weights", weights_arg,
                        "covid-only, covid-cancer, equal, custom-0.45, or k1,k2,k3");
  score_cmd->add_option("--age-filter", age_filter, "Restrict attributes to an age filter");

  // pareto
  auto* pareto_cmd = app.add_subcommand("pareto", "Pareto front on grouped attribute axes");
  std::string grouping{kDefaultAxisGrouping};
  pareto_cmd->add_option("run", run_arg, "Run id or run directory")->required();
  pareto_cmd->add_option("--grouping", grouping, "Axis grouping key");
  pareto_cmd->add_option("--age-filter", age_filter, "Restrict attributes to an age filter");

  // critical-weight
  auto* cw_cmd = app.add_subcommand("critical-weight", "Weight at which lockdown and non-lockdown swap");
  cw_cmd->add_option("run", run_arg, "Run id or run directory")->required();
  cw_cmd->add_option("--age-filter", age_filter, "Restrict attributes to an age filter");

  // export
  auto* export_cmd = app.add_subcommand("export", "Write the per-strategy table");
  std::string format = "csv", output;
  std::optional<std::string> export_weights;
  export_cmd->add_option("run", run_arg, "Run id or run directory")->required();
  export_cmd->add_option("--format", format, "csv, tsv or table");
  export_cmd->add_option("--weights", export_weights, "Weights for the score column");
  export_cmd->add_option("--age-filter", age_filter, "Restrict attributes to an age filter");
  export_cmd->add_option("-o,--output", output, "Output file (default: <data>/exports/<run>.<ext>)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
  ServerConfig server_config;
  server_config.port = std::stoi(env_or("DSS_PORT", "8080"));
  std::string static_dir = env_or("DSS_STATIC_DIR", "");
  serve_cmd->add_option("--port", server_config.port, "Port, 0 for ephemeral (env DSS_PORT)");
  serve_cmd->add_option("--host", server_config.host, "Bind address");
  serve_cmd->add_option("--static-dir", static_dir, "Built UI bundle to serve at / (env DSS_STATIC_DIR)");
  serve_cmd->add_option("--threads", threads, "Simulation worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run_cmd || *validate_cmd) {
      const fs::path path = scenario_path(scenario_arg);
      if (!fs::exists(path)) {
        std::cerr << "error: file not found: " << path.string() << "\n";
        return kExitValidation;
      }
      std::vector<std::string> warnings;
      Scenario sc = load_scenario(path, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      if (*validate_cmd) {
        std::cout << "ok " << scenario_digest(sc) << " (" << sc.strategies.size() << " strategies, "
                  << sc.run.n_runs << " runs, " << sc.run.horizon_weeks << " weeks)\n";
        return 0;
      }
      if (seed) sc.run.seed = *seed;
      if (n_runs) sc.run.n_runs = *n_runs;
      ResultStore store(data_dir);
      const std::string id = ResultStore::run_id(sc);
      if (!store.has_run(id)) {
        EnsembleOptions opts;
        opts.threads = threads;
        store.put_run(sc, run_scenario(sc, opts));
      } else {
        std::cerr << "run already stored; reusing it\n";
      }
      const StoredRun stored = store.get_run(id);
      const auto rows = export_rows(stored.ensemble, stored.attributes.at("all"), std::nullopt);
      if (!machine) std::cout << "run " << id << "\n";
      print_rows(rows, machine);
      if (!machine) std::cout << "stored in " << store.run_dir(id).string() << "\n";
      return 0;
    }

    if (*score_cmd) {
      const WeightVector w = parse_weights(weights_arg);
      const auto ref = open_run(run_arg, data_dir);
      const auto& table = table_for(ref.run, age_filter);
      const auto rows = export_rows(ref.run.ensemble, table, w);
      std::vector<ExportRow> ordered;
      for (const auto& s : rank(w, table)) {
        for (const auto& r : rows) {
          if (r.strategy_id == s.strategy_id) ordered.push_back(r);
        }
      }
      print_rows(ordered, machine);
      return 0;
    }

    if (*pareto_cmd) {
      const auto g = axis_grouping(grouping);
      if (!g) throw ValidationError("grouping", "unknown axis grouping '" + grouping + "'");
      const auto ref = open_run(run_arg, data_dir);
      const auto points = group_points(table_for(ref.run, age_filter), *g);
      const auto front = pareto_front(points);
      if (!machine) std::printf("%-8s %14s %14s  %s\n", "strategy", "x", "y", "front");
      else std::cout << "strategy_id\tx\ty\ton_front\n";
      for (const auto& p : points) {
        const bool on = std::any_of(front.begin(), front.end(), [&](const auto& f) { return f.id == p.id; });
        if (machine) {
          std::cout << p.id << '\t' << format_number(p.x) << '\t' << format_number(p.y) << '\t'
                    << (on ? 1 : 0) << '\n';
        } else {
          std::printf("%-8s %14s %14s  %s\n", p.id.c_str(), fmt(p.x).c_str(), fmt(p.y).c_str(),
                      on ? "*" : "");
        }
      }
      return 0;
    }

    if (*cw_cmd) {
      const auto ref = open_run(run_arg, data_dir);
      const auto sides =
          split_by_partition(table_for(ref.run, age_filter), default_partition(ref.run.snapshot.strategies));
      if (sides.lockdown.empty() || sides.non_lockdown.empty()) {
        throw ValidationError("partition", "both sides need at least one strategy");
      }
      const auto cw = critical_weight(sides.lockdown, sides.non_lockdown);
      const std::string kind = cw.kind == CrossingKind::Crossing     ? "crossing"
                               : cw.kind == CrossingKind::NoCrossing ? "no_crossing"
                                                                     : "degenerate";
      const std::string c = cw.kind == CrossingKind::Crossing ? format_number(cw.c) : "-";
      const std::string ratio = cw.ratio ? format_number(*cw.ratio) : "-";
      if (machine) {
        std::cout << "kind\t" << kind << "\nc\t" << c << "\nratio\t" << ratio << "\nbest_lockdown\t"
                  << cw.best_lockdown << "\nbest_non_lockdown\t" << cw.best_non_lockdown << "\n";
      } else {
        std::cout << "result:            " << kind << "\n"
                  << "c*:                " << c << "\n"
                  << "ratio c/(1-2c):    " << ratio << "\n"
                  << "best lockdown:     " << cw.best_lockdown << "\n"
                  << "best non-lockdown: " << cw.best_non_lockdown << "\n";
      }
      return 0;
    }

    if (*export_cmd) {
      const ExportFormat f = export_format_from_string(format);
      std::optional<WeightVector> w;
      if (export_weights) w = parse_weights(*export_weights);
      const auto ref = open_run(run_arg, data_dir);
      const auto rows = export_rows(ref.run.ensemble, table_for(ref.run, age_filter), w);
      const fs::path out = output.empty() ? ResultStore(ref.root).export_path(ref.run.id, file_extension(f)) : fs::path(output);
      std::ofstream file(out, std::ios::binary | std::ios::trunc);
      file << write_table(rows, f);
      file.close();
      if (!file) throw std::runtime_error("failed to write " + out.string());
      std::cout << out.string() << " (" << rows.size() << " rows)\n";
      return 0;
    }

    if (*serve_cmd) {
      server_config.data_dir = data_dir;
      server_config.simulation_threads = threads;
      if (!static_dir.empty()) server_config.static_dir = static_dir;
      Server server(server_config);
      const int port = server.bind();
      std::cout << "listening on http://" << server_config.host << ":" << port << std::endl;
      server.listen();
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
