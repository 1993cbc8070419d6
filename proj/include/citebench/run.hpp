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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "citebench/error.hpp"
#include "citebench/types.hpp"

namespace citebench {

/// Binary relevance judgements: query id -> cited (relevant) article ids.
using Qrels = std::map<ArticleId, IdSet>;

/// Ranked candidate lists produced by one model.
struct RetrievalRun {
  std::string model;
  std::size_t cutoff = 0;
  std::map<ArticleId, std::vector<ScoredId>> results;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!cols.empty() && !cols.back().empty() && cols.back().back() == '\r') cols.back().pop_back();
  return cols;
}

inline std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Run file: `query_id \t doc_id \t rank \t score`, ranks starting at 1.
inline void write_run(std::ostream& out, const RetrievalRun& run) {
  for (const auto& [query, ranked] : run.results)
    for (std::size_t r = 0; r < ranked.size(); ++r)
      out << query << '\t' << ranked[r].id << '\t' << (r + 1) << '\t'
          << detail::format_score(ranked[r].score) << '\n';
}

inline RetrievalRun read_run(std::istream& in, std::string model = {}) {
  RetrievalRun run;
  run.model = std::move(model);
  std::map<ArticleId, std::vector<std::pair<std::size_t, ScoredId>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 4)
      throw Error("malformed_run", "run line " + std::to_string(line_no) + ": expected 4 columns");
    try {
      rows[cols[0]].push_back({std::stoul(cols[2]), {cols[1], std::stod(cols[3])}});
    } catch (const std::logic_error&) {
      throw Error("malformed_run", "run line " + std::to_string(line_no) + ": bad rank or score");
    }
  }
  for (auto& [query, list] : rows) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& ranked = run.results[query];
    for (auto& [rank, scored] : list) ranked.push_back(std::move(scored));
    run.cutoff = std::max(run.cutoff, ranked.size());
  }
  return run;
}

/// Qrels file: `query_id \t doc_id`.
inline void write_qrels(std::ostream& out, const Qrels& qrels) {
  for (const auto& [query, relevant] : qrels)
    for (const auto& doc : relevant) out << query << '\t' << doc << '\n';
}

inline Qrels read_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 2)
      throw Error("malformed_qrels", "qrels line " + std::to_string(line_no) + ": expected 2 columns");
    qrels[cols[0]].insert(cols[1]);
  }
  return qrels;
}

inline RetrievalRun load_run(const std::string& path, std::string model = {}) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read run file " + path);
  return read_run(in, std::move(model));
}

inline void save_run(const std::string& path, const RetrievalRun& run) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write run file " + path);
  write_run(out, run);
}

}  // namespace citebench
