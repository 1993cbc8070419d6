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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citebench/benchgen.hpp"
#include "citebench/bm25.hpp"
#include "citebench/corpus.hpp"
#include "citebench/dense.hpp"
#include "citebench/error.hpp"
#include "citebench/metrics.hpp"
#include "citebench/parallel.hpp"
#include "citebench/pools.hpp"
#include "citebench/run.hpp"

namespace citebench {

/// A ranking backend. rank() orders `candidates` for `query` and returns at
/// most k of them, best first; the query itself is never returned.
class RetrievalModel {
 public:
  virtual ~RetrievalModel() = default;

  virtual const std::string& name() const = 0;
  virtual std::vector<ScoredId> rank(const ArticleId& query, const IdSet& candidates,
                                     std::size_t k) const = 0;
  /// Whether rank() may be called from several threads at once.
  virtual bool concurrent() const { return true; }
};

/// BM25 over title + abstract; the query text is built the same way.
class Bm25Model final : public RetrievalModel {
 public:
  Bm25Model(std::string name, const Corpus& corpus, const Bm25Index& index, Bm25Params params)
      : name_(std::move(name)), corpus_(corpus), index_(index), params_(params) {
    params_.validate();
  }

  const std::string& name() const override { return name_; }
  const Bm25Params& params() const { return params_; }

  std::vector<ScoredId> rank(const ArticleId& query, const IdSet& candidates,
                             std::size_t k) const override {
    const Article* a = corpus_.find(query);
    if (a == nullptr) throw Error("missing_representation", "no text for query " + query);
    for (const auto& c : candidates)
      if (!index_.contains(c))
        throw Error("missing_representation", "candidate not indexed: " + c);
    auto ranked = index_.search(a->text(), params_, k, &candidates, &query);
    // Candidates sharing no term with the query score 0 and follow in id order.
    if (ranked.size() < k) {
      IdSet matched;
      for (const auto& s : ranked) matched.insert(s.id);
      for (const auto& c : candidates) {
        if (ranked.size() >= k) break;
        if (c != query && !matched.contains(c)) ranked.push_back({c, 0.0});
      }
    }
    return ranked;
  }

 private:
  std::string name_;
  const Corpus& corpus_;
  const Bm25Index& index_;
  Bm25Params params_;
};

/// Exact nearest-neighbor ranking over precomputed article embeddings.
class DenseModel final : public RetrievalModel {
 public:
  DenseModel(std::string name, const EmbeddingStore& store, Metric metric = Metric::Cosine)
      : name_(std::move(name)), store_(store), metric_(metric) {}

  const std::string& name() const override { return name_; }
  Metric metric() const { return metric_; }

  std::vector<ScoredId> rank(const ArticleId& query, const IdSet& candidates,
                             std::size_t k) const override {
    const auto q = store_.vector_for(query);
    for (const auto& c : candidates)
      if (!store_.contains(c))
        throw Error("missing_representation", "no embedding for candidate " + c);
    return knn(store_, q, k, metric_, {&candidates, &query, 1});
  }

 private:
  std::string name_;
  const EmbeddingStore& store_;
  Metric metric_;
};

/// Ranks the shared pool for every pool query and keeps the top `cutoff`.
inline RetrievalRun run_retrieval(const RetrievalModel& model, const PoolSet& pool,
                                  std::size_t cutoff, std::size_t threads = 1) {
  if (cutoff == 0) throw Error("invalid_argument", "cutoff must be positive");
  std::vector<std::vector<ScoredId>> ranked(pool.queries.size());
  parallel_for(pool.queries.size(), model.concurrent() ? threads : 1, [&](std::size_t i) {
    ranked[i] = model.rank(pool.queries[i].query_id, pool.pool_ids, cutoff);
  });
  RetrievalRun run;
  run.model = model.name();
  run.cutoff = cutoff;
  for (std::size_t i = 0; i < ranked.size(); ++i)
    run.results[pool.queries[i].query_id] = std::move(ranked[i]);
  return run;
}

/// Per-field MAP and R@5 plus their unweighted mean across fields.
struct BenchmarkReport {
  std::vector<std::string> metrics{"MAP", "R@5"};
  std::map<Field, MetricsReport> per_field;
  std::map<std::string, double> average;
};

namespace detail {

inline std::map<std::string, double> score_closed_pool(const RetrievalModel& model,
                                                       const ArticleId& query,
                                                       const IdSet& candidates,
                                                       const IdSet& positives) {
  const auto ranked = ids_of(model.rank(query, candidates, candidates.size()));
  return {{"MAP", average_precision(ranked, positives)},
          {"R@5", recall_at_k(ranked, positives, 5)}};
}

}  // namespace detail

/// Ranks each entry's closed candidate pool (positives + all negatives).
inline BenchmarkReport evaluate_benchmark(const RetrievalModel& model, const Benchmark& bench,
                                          std::size_t threads = 1) {
  std::vector<std::map<std::string, double>> values(bench.entries.size());
  parallel_for(bench.entries.size(), model.concurrent() ? threads : 1, [&](std::size_t i) {
    const auto& e = bench.entries[i];
    values[i] = detail::score_closed_pool(model, e.query_id, e.candidates(), e.positives);
  });
  BenchmarkReport report;
  for (std::size_t i = 0; i < bench.entries.size(); ++i) {
    auto& field_report = report.per_field[bench.entries[i].field];
    field_report.metrics = report.metrics;
    field_report.per_query[bench.entries[i].query_id] = std::move(values[i]);
  }
  for (auto& [field, r] : report.per_field) r.aggregate();
  for (const auto& m : report.metrics) {
    double sum = 0.0;
    for (const auto& [field, r] : report.per_field) sum += r.mean.at(m);
    report.average[m] =
        report.per_field.empty() ? 0.0 : sum / static_cast<double>(report.per_field.size());
  }
  return report;
}

/// The 15-candidate pool (positives + one type's negatives) for each entry.
inline IdSet typed_pool(const BenchmarkEntry& e, CandidateType type) {
  IdSet pool = e.positives;
  if (auto it = e.negatives.find(type); it != e.negatives.end())
    pool.insert(it->second.begin(), it->second.end());
  return pool;
}

/// MAP and R@5 per candidate type, aggregated over all entries.
inline std::map<CandidateType, MetricsReport> candidate_type_breakdown(
    const RetrievalModel& model, const Benchmark& bench, std::size_t threads = 1) {
  const std::size_t n_types = kCandidateTypes.size();
  std::vector<std::map<std::string, double>> values(bench.entries.size() * n_types);
  parallel_for(values.size(), model.concurrent() ? threads : 1, [&](std::size_t i) {
    const auto& e = bench.entries[i / n_types];
    values[i] = detail::score_closed_pool(model, e.query_id, typed_pool(e, kCandidateTypes[i % n_types]),
                                          e.positives);
  });
  std::map<CandidateType, MetricsReport> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto& r = out[kCandidateTypes[i % n_types]];
    r.metrics = {"MAP", "R@5"};
    r.per_query[bench.entries[i / n_types].query_id] = std::move(values[i]);
  }
  for (auto& [t, r] : out) r.aggregate();
  return out;
}

}  // namespace citebench
