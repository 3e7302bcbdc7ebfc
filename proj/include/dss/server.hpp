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
#include <memory>
#include <optional>
#include <string>

namespace dss {

enum class JobState { Queued, Running, Done, Failed };

std::string_view to_string(JobState state) noexcept;

struct JobStatus {
  std::string run_id;
  JobState state = JobState::Queued;
  double progress = 0.0;  // [0, 1]
  std::string error;      // set when failed
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks an ephemeral port
  std::filesystem::path data_dir = "dss-data";
  std::optional<std::filesystem::path> static_dir;  // built UI bundle, served at /
  unsigned simulation_threads = 0;                  // 0: hardware concurrency
};

/// HTTP API over a ResultStore. Simulations run on a single background job
/// queue; scoring endpoints read cached, immutable run results.
///
///   GET  /api/health
///   GET  /api/presets
///   GET  /api/scenarios                 POST /api/scenarios
///   GET  /api/scenarios/:id
///   GET  /api/runs                      POST /api/runs
///   GET  /api/runs/:id                  (job status)
///   GET  /api/runs/:id/summary
///   POST /api/runs/:id/score
///   GET  /api/runs/:id/pareto?grouping=&age_filter=
///   POST /api/runs/:id/critical-weight
///   GET  /api/runs/:id/export?format=&weights=
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the listening socket and returns the port. Throws on failure.
  int bind();
  /// Serves until stop(); bind() must have succeeded.
  void listen();
  void stop();

  /// Blocks until the job for `run_id` leaves queued/running (tests, CLI).
  JobStatus wait(const std::string& run_id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dss
