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
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "citebench/error.hpp"
#include "citebench/run.hpp"
#include "citebench/types.hpp"

namespace citebench {

/// Mean of precision@rank over relevant items found in `ranked`, divided by
/// the full relevant count (unretrieved relevant items contribute 0).
inline double average_precision(std::span<const ArticleId> ranked, const IdSet& relevant) {
  if (relevant.empty()) throw Error("empty_relevant", "average_precision: empty relevant set");
  std::unordered_set<std::string_view> seen;
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (!relevant.contains(ranked[r]) || !seen.insert(ranked[r]).second) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

/// Binary-gain nDCG with a log2(rank + 1) discount; the ideal DCG is
/// truncated at min(|relevant|, |ranked|).
inline double ndcg(std::span<const ArticleId> ranked, const IdSet& relevant) {
  if (relevant.empty()) throw Error("empty_relevant", "ndcg: empty relevant set");
  std::unordered_set<std::string_view> seen;
  double dcg = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r)
    if (relevant.contains(ranked[r]) && seen.insert(ranked[r]).second)
      dcg += 1.0 / std::log2(static_cast<double>(r + 2));
  const std::size_t ideal = std::min(relevant.size(), ranked.size());
  double idcg = 0.0;
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r + 2));
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

inline double recall_at_k(std::span<const ArticleId> ranked, const IdSet& relevant, std::size_t k) {
  if (k == 0) throw Error("invalid_argument", "recall_at_k: k must be positive");
  if (relevant.empty()) throw Error("empty_relevant", "recall_at_k: empty relevant set");
  std::unordered_set<std::string_view> found;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r)
    if (relevant.contains(ranked[r])) found.insert(ranked[r]);
  return static_cast<double>(found.size()) / static_cast<double>(relevant.size());
}

inline double jaccard(const IdSet& a, const IdSet& b) {
  if (a.empty() && b.empty()) throw Error("invalid_argument", "jaccard: both sets empty");
  const std::size_t shared = set_intersection(a, b).size();
  return static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
}

inline std::string recall_name(std::size_t k) { return "R@" + std::to_string(k); }

struct MetricsReport {
  std::vector<std::string> metrics;  // column order
  std::map<ArticleId, std::map<std::string, double>> per_query;
  std::map<std::string, double> mean;

  /// Recomputes `mean` as the unweighted average over `per_query`.
  void aggregate() {
    mean.clear();
    for (const auto& m : metrics) {
      double sum = 0.0;
      for (const auto& [q, values] : per_query) sum += values.at(m);
      mean[m] = per_query.empty() ? 0.0 : sum / static_cast<double>(per_query.size());
    }
  }
};

/// MAP, nDCG and R@cutoff per query. Every qrels query with a non-empty
/// relevant set is evaluated; queries missing from the run score 0.
inline MetricsReport evaluate_run(const RetrievalRun& run, const Qrels& qrels,
                                  std::size_t recall_cutoff) {
  if (recall_cutoff == 0) throw Error("invalid_argument", "recall cutoff must be positive");
  for (const auto& [query, ranked] : run.results)
    if (!qrels.contains(query))
      throw Error("unknown_query", "run query not present in qrels: " + query);
  MetricsReport report;
  const std::string recall = recall_name(recall_cutoff);
  report.metrics = {"MAP", "nDCG", recall};
  for (const auto& [query, relevant] : qrels) {
    if (relevant.empty()) continue;
    auto& values = report.per_query[query];
    auto it = run.results.find(query);
    if (it == run.results.end()) {
      values = {{"MAP", 0.0}, {"nDCG", 0.0}, {recall, 0.0}};
      continue;
    }
    const auto ranked = ids_of(it->second);
    values["MAP"] = average_precision(ranked, relevant);
    values["nDCG"] = ndcg(ranked, relevant);
    values[recall] = recall_at_k(ranked, relevant, recall_cutoff);
  }
  report.aggregate();
  return report;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
inline MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace citebench
