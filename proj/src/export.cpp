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

#include "dss/export.hpp"

#include <charconv>
#include <stdexcept>

#include "dss/error.hpp"

namespace dss {

ExportFormat export_format_from_string(std::string_view name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "tsv" || name == "table") return ExportFormat::Tsv;
  throw ValidationError("format", "unknown export format '" + std::string(name) +
                                      "' (expected csv, tsv or table)");
}

std::string_view file_extension(ExportFormat format) noexcept {
  return format == ExportFormat::Csv ? "csv" : "tsv";
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<ExportRow> export_rows(const EnsembleResult& ensemble,
                                   std::span<const StrategyAttributes> attributes,
                                   const std::optional<WeightVector>& weights) {
  std::vector<ExportRow> rows;
  rows.reserve(ensemble.strategies.size());
  for (const auto& s : ensemble.strategies) {
    const StrategyAttributes* attrs = nullptr;
    for (const auto& a : attributes) {
      if (a.strategy_id == s.strategy_id) attrs = &a;
    }
    if (!attrs) throw std::invalid_argument("no attributes for strategy '" + s.strategy_id + "'");
    if (attrs->attributes.a.size() != kAttributeCount) {
      throw std::invalid_argument("attribute dimension mismatch for '" + s.strategy_id + "'");
    }
    ExportRow row;
    row.strategy_id = s.strategy_id;
    for (std::size_t i = 0; i < kAttributeCount; ++i) row.attributes[i] = attrs->attributes.a[i];
    row.weeks = s.expected_weeks_in_regime;
    if (weights) row.score = expected_utility(*weights, attrs->attributes);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

char delimiter(ExportFormat format) { return format == ExportFormat::Csv ? ',' : '\t'; }

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, const std::string& path) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ValidationError(path, "not a number: '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string write_table(std::span<const ExportRow> rows, ExportFormat format) {
  const char d = delimiter(format);
  std::string out;
  for (std::size_t c = 0; c < kExportColumns.size(); ++c) {
    if (c) out += d;
    out += kExportColumns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.strategy_id.find_first_of(std::string{d, '\n', '\r'}) != std::string::npos) {
      throw std::invalid_argument("strategy id contains a delimiter: '" + row.strategy_id + "'");
    }
    out += row.strategy_id;
    for (double v : row.attributes) (out += d) += format_number(v);
    for (double v : row.weeks) (out += d) += format_number(v);
    out += d;
    if (row.score) out += format_number(*row.score);
    out += '\n';
  }
  return out;
}

std::vector<ExportRow> read_table(std::string_view text, ExportFormat format) {
  const char d = delimiter(format);
  std::vector<ExportRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, d);
    const std::string path = "line " + std::to_string(line_no);
    if (fields.size() != kExportColumns.size()) {
      throw ValidationError(path, "expected " + std::to_string(kExportColumns.size()) + " columns");
    }
    if (!header_seen) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c] != kExportColumns[c]) {
          throw ValidationError(path, "unexpected header column '" + std::string(fields[c]) + "'");
        }
      }
      header_seen = true;
      continue;
    }
    ExportRow row;
    row.strategy_id = std::string(fields[0]);
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
      row.attributes[i] = parse_number(fields[1 + i], path + "." + std::string(kExportColumns[1 + i]));
    }
    for (std::size_t r = 0; r < kRegimeCount; ++r) {
      row.weeks[r] = parse_number(fields[4 + r], path + "." + std::string(kExportColumns[4 + r]));
    }
    if (!fields[7].empty()) row.score = parse_number(fields[7], path + ".score");
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ValidationError("header", "missing header row");
  return rows;
}

}  // namespace dss
