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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dss/decision.hpp"
#include "dss/monte_carlo.hpp"

namespace dss {

enum class ExportFormat { Csv, Tsv };

/// "csv", "tsv", or "table" (tab-separated).
ExportFormat export_format_from_string(std::string_view name);
std::string_view file_extension(ExportFormat format) noexcept;

/// One exported line. Columns, in order:
///   strategy_id, a1_covid, a2_cancer, a3_poverty, weeks_r0, weeks_r1, weeks_r2, score
/// score is left empty when no weights were supplied.
struct ExportRow {
  std::string strategy_id;
  std::array<double, kAttributeCount> attributes{};
  std::array<double, kRegimeCount> weeks{};
  std::optional<double> score;
  friend bool operator==(const ExportRow&, const ExportRow&) = default;
};

inline constexpr std::array<std::string_view, 8> kExportColumns = {
    "strategy_id", "a1_covid", "a2_cancer", "a3_poverty",
    "weeks_r0",    "weeks_r1", "weeks_r2",  "score"};

/// Rows in ensemble strategy order. Throws std::invalid_argument if a
/// strategy has no attribute row.
std::vector<ExportRow> export_rows(const EnsembleResult& ensemble,
                                   std::span<const StrategyAttributes> attributes,
                                   const std::optional<WeightVector>& weights);

std::string write_table(std::span<const ExportRow> rows, ExportFormat format);

/// Inverse of write_table. Throws ValidationError on a malformed table.
std::vector<ExportRow> read_table(std::string_view text, ExportFormat format);

/// Shortest decimal that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace dss
