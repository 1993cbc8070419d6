// Copyright (c) 2026 The citebench Authors. All Rights Reserved
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "citebench/benchgen.hpp"
#include "citebench/error.hpp"
#include "citebench/field.hpp"
#include "citebench/harness.hpp"
#include "citebench/metrics.hpp"

namespace citebench {

/// A rectangular table of metric values in [0, 1], rendered ×100 with one
/// decimal. Missing cells render as "-".
struct ReportTable {
  std::string title;
  std::string row_header = "model";
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<std::optional<double>>>> rows;
};

enum class ReportFormat { Tsv, Markdown };

inline std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

inline std::string render(const ReportTable& t, ReportFormat format) {
  std::ostringstream out;
  auto cell = [](const std::optional<double>& v) { return v ? format_percent(*v) : "-"; };
  if (format == ReportFormat::Tsv) {
    out << t.row_header;
    for (const auto& c : t.columns) out << '\t' << c;
    out << '\n';
    for (const auto& [label, values] : t.rows) {
      out << label;
      for (const auto& v : values) out << '\t' << cell(v);
      out << '\n';
    }
    return out.str();
  }
  if (!t.title.empty()) out << "### " << t.title << "\n\n";
  out << "| " << t.row_header;
  for (const auto& c : t.columns) out << " | " << c;
  out << " |\n|---";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << "|---:";
  out << "|\n";
  for (const auto& [label, values] : t.rows) {
    out << "| " << label;
    for (const auto& v : values) out << " | " << cell(v);
    out << " |\n";
  }
  return out.str();
}

/// Writes tables back to back (a blank line between them).
inline void emit_report(const std::vector<ReportTable>& tables, ReportFormat format,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write report " + path);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i > 0) out << '\n';
    out << render(tables[i], format);
  }
  if (!out) throw Error("io", "failed writing report " + path);
}

/// Rows = models (in the given order); columns = named metrics.
inline ReportTable metrics_table(std::string title,
                                 const std::vector<std::pair<std::string, std::map<std::string, double>>>& rows,
                                 const std::vector<std::string>& metrics) {
  ReportTable t{std::move(title), "model", metrics, {}};
  for (const auto& [model, values] : rows) {
    std::vector<std::optional<double>> cells;
    for (const auto& m : metrics) {
      auto it = values.find(m);
      cells.push_back(it == values.end() ? std::nullopt : std::optional<double>(it->second));
    }
    t.rows.emplace_back(model, std::move(cells));
  }
  return t;
}

/// Field columns in canonical order (only fields some model reports), then AVG.
inline ReportTable field_table(std::string title, const std::string& metric,
                               const std::vector<std::pair<std::string, BenchmarkReport>>& rows) {
  std::set<Field> present;
  for (const auto& [model, r] : rows)
    for (const auto& [f, fr] : r.per_field) present.insert(f);
  ReportTable t{std::move(title), "model", {}, {}};
  for (Field f : present) t.columns.emplace_back(field_abbreviation(f));
  t.columns.emplace_back("AVG");
  for (const auto& [model, r] : rows) {
    std::vector<std::optional<double>> cells;
    for (Field f : present) {
      auto it = r.per_field.find(f);
      cells.push_back(it == r.per_field.end() ? std::nullopt
                                              : std::optional<double>(it->second.mean.at(metric)));
    }
    auto avg = r.average.find(metric);
    cells.push_back(avg == r.average.end() ? std::nullopt : std::optional<double>(avg->second));
    t.rows.emplace_back(model, std::move(cells));
  }
  return t;
}

/// Columns "<TYPE> MAP", "<TYPE> R@5" for the six candidate types.
inline ReportTable type_table(
    std::string title,
    const std::vector<std::pair<std::string, std::map<CandidateType, MetricsReport>>>& rows) {
  ReportTable t{std::move(title), "model", {}, {}};
  for (auto type : kCandidateTypes)
    for (const char* m : {"MAP", "R@5"}) t.columns.push_back(std::string(type_name(type)) + " " + m);
  for (const auto& [model, per_type] : rows) {
    std::vector<std::optional<double>> cells;
    for (auto type : kCandidateTypes)
      for (const char* m : {"MAP", "R@5"}) {
        auto it = per_type.find(type);
        cells.push_back(it == per_type.end() ? std::nullopt
                                             : std::optional<double>(it->second.mean.at(m)));
      }
    t.rows.emplace_back(model, std::move(cells));
  }
  return t;
}

}  // namespace citebench
