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

#include <cstdint>
#include <fstream>
#include <functional>
#include <algorithm>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citebench/corpus.hpp"
#include "citebench/error.hpp"
#include "citebench/field.hpp"
#include "citebench/rng.hpp"
#include "citebench/run.hpp"
#include "citebench/types.hpp"

namespace citebench {

enum class PoolSetup { Dataset, Field };

inline std::string_view setup_name(PoolSetup s) {
  return s == PoolSetup::Dataset ? "dataset" : "field";
}

inline PoolSetup parse_setup(std::string_view s) {
  if (s == "dataset") return PoolSetup::Dataset;
  if (s == "field") return PoolSetup::Field;
  throw Error("invalid_argument", "unknown pool setup: " + std::string(s));
}

struct SamplingPlan {
  int query_year = 2019;
  std::size_t queries_per_unit = 200;
  std::vector<std::size_t> pool_sizes{2000, 5000, 10000, 20000};
  std::size_t repetitions = 3;
  IdSet exclusion_ids;
  std::uint64_t rng_seed = 0;
  std::size_t min_out_citations = 1;  // in-corpus references a query needs
};

/// A query's view of a shared pool.
struct CandidatePool {
  ArticleId query_id;
  IdSet positives;
  IdSet negatives;
  std::uint64_t seed = 0;
  PoolSetup setup = PoolSetup::Dataset;
  std::optional<Field> field;
  std::size_t target_size = 0;
  bool shortfall = false;
};

struct PoolQuery {
  ArticleId query_id;
  IdSet positives;
};

/// One candidate universe shared by every query of a run.
struct PoolSet {
  PoolSetup setup = PoolSetup::Dataset;
  std::optional<Field> field;
  std::uint64_t seed = 0;
  std::size_t target_size = 0;
  int query_year = 0;
  // Set when the eligible fill population could not reach target_size.
  bool shortfall = false;
  IdSet pool_ids;
  std::vector<PoolQuery> queries;

  /// Per-query candidates: the shared pool minus the query itself.
  CandidatePool candidate_pool(const ArticleId& query) const {
    for (const auto& q : queries) {
      if (q.query_id != query) continue;
      CandidatePool c{query, q.positives, {}, seed, setup, field, target_size, shortfall};
      for (const auto& id : pool_ids)
        if (id != query && !q.positives.contains(id)) c.negatives.insert(c.negatives.end(), id);
      return c;
    }
    throw Error("unknown_query", "query not in pool: " + query);
  }

  Qrels qrels() const {
    Qrels out;
    for (const auto& q : queries) out[q.query_id] = q.positives;
    return out;
  }
};

namespace detail {

inline IdSet cited_in_corpus(const Corpus& corpus, const CitationGraph& graph,
                             const ArticleId& id) {
  IdSet out;
  for (const auto& c : graph.out(id))
    if (corpus.contains(c)) out.insert(out.end(), c);
  return out;
}

inline std::vector<ArticleId> sorted_sample(Rng& rng, std::vector<ArticleId> population,
                                            std::size_t n) {
  auto s = rng.sample(std::move(population), n);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

/// Uniform sample (no replacement) of plan.queries_per_unit articles from the
/// given year, optional field, outside the exclusion set, citing at least one
/// corpus article. Returned in ascending id order.
inline std::vector<ArticleId> sample_queries(const Corpus& corpus, const CitationGraph& graph,
                                             const SamplingPlan& plan,
                                             std::optional<Field> field = std::nullopt) {
  std::vector<ArticleId> eligible;
  for (const auto& id : corpus.ids()) {
    const Article& a = corpus.at(id);
    if (!a.year || *a.year != plan.query_year) continue;
    if (field && !a.has_field(*field)) continue;
    if (plan.exclusion_ids.contains(id)) continue;
    std::size_t cited = 0;
    for (const auto& c : graph.out(id))
      if (corpus.contains(c) && ++cited >= plan.min_out_citations) break;
    if (cited >= std::max<std::size_t>(plan.min_out_citations, 1)) eligible.push_back(id);
  }
  if (eligible.size() < plan.queries_per_unit)
    throw Error("insufficient_population",
                "only " + std::to_string(eligible.size()) + " eligible queries" +
                    (field ? " in field " + std::string(field_abbreviation(*field)) : "") +
                    ", requested " + std::to_string(plan.queries_per_unit));
  Rng rng(plan.rng_seed);
  return detail::sorted_sample(rng, std::move(eligible), plan.queries_per_unit);
}

namespace detail {

inline PoolSet assemble_pool(const Corpus& corpus, const CitationGraph& graph,
                             std::span<const ArticleId> queries, std::size_t size,
                             std::uint64_t seed, int query_year,
                             const std::function<bool(const ArticleId&)>& fill_source) {
  PoolSet pool;
  pool.seed = seed;
  pool.target_size = size;
  pool.query_year = query_year;
  IdSet query_ids;
  for (const auto& q : queries) {
    if (!corpus.contains(q)) throw Error("unknown_article", "query not in corpus: " + q);
    if (!query_ids.insert(q).second) throw Error("duplicate_id", "duplicate query: " + q);
    PoolQuery pq{q, cited_in_corpus(corpus, graph, q)};
    pool.pool_ids.insert(pq.positives.begin(), pq.positives.end());
    pool.queries.push_back(std::move(pq));
  }
  if (size < pool.pool_ids.size())
    throw Error("pool_too_small", "pool size " + std::to_string(size) + " cannot hold the " +
                                      std::to_string(pool.pool_ids.size()) + " cited articles");
  std::vector<ArticleId> fill;
  for (const auto& id : corpus.ids()) {
    if (pool.pool_ids.contains(id) || query_ids.contains(id)) continue;
    const Article& a = corpus.at(id);
    if (!a.year || *a.year > query_year) continue;
    if (fill_source(id)) fill.push_back(id);
  }
  const std::size_t need = size - pool.pool_ids.size();
  if (fill.size() < need) pool.shortfall = true;
  Rng rng(seed);
  for (auto& id : rng.sample(std::move(fill), need)) pool.pool_ids.insert(std::move(id));
  return pool;
}

}  // namespace detail

/// Dataset-level pool: the union of all query-cited articles topped up to
/// `size` with random corpus articles from `query_year` or earlier. Cited
/// articles are never year-filtered; queries are never used as fill.
inline PoolSet build_dataset_pool(const Corpus& corpus, const CitationGraph& graph,
                                  std::span<const ArticleId> queries, std::size_t size,
                                  std::uint64_t seed, int query_year = 2019) {
  auto pool = detail::assemble_pool(corpus, graph, queries, size, seed, query_year,
                                    [](const ArticleId&) { return true; });
  pool.setup = PoolSetup::Dataset;
  return pool;
}

/// Field-level pool: as the dataset pool, but the fill is drawn from the
/// field-cited set.
inline PoolSet build_field_pool(const Corpus& corpus, const CitationGraph& graph, Field field,
                                std::span<const ArticleId> queries, std::size_t size,
                                std::uint64_t seed, int query_year = 2019) {
  const IdSet source = field_cited_set(corpus, graph, field);
  auto pool = detail::assemble_pool(corpus, graph, queries, size, seed, query_year,
                                    [&](const ArticleId& id) { return source.contains(id); });
  pool.setup = PoolSetup::Field;
  pool.field = field;
  return pool;
}

inline PoolSet build_field_pool(const Corpus& corpus, const CitationGraph& graph,
                                std::string_view field_label, std::span<const ArticleId> queries,
                                std::size_t size, std::uint64_t seed, int query_year = 2019) {
  auto f = parse_field(field_label);
  if (!f) throw Error("unknown_field", "unknown field label: " + std::string(field_label));
  return build_field_pool(corpus, graph, *f, queries, size, seed, query_year);
}

/// Repetition i uses seed base_seed + i.
inline std::vector<PoolSet> repeat_pools(const std::function<PoolSet(std::uint64_t)>& builder,
                                         std::size_t repetitions, std::uint64_t base_seed) {
  if (repetitions == 0) throw Error("invalid_argument", "repetitions must be >= 1");
  std::vector<PoolSet> out;
  out.reserve(repetitions);
  for (std::size_t i = 0; i < repetitions; ++i) out.push_back(builder(base_seed + i));
  return out;
}

inline nlohmann::json pool_to_json(const PoolSet& pool) {
  nlohmann::json j;
  j["setup"] = setup_name(pool.setup);
  if (pool.field) j["field"] = field_abbreviation(*pool.field);
  j["seed"] = pool.seed;
  j["target_size"] = pool.target_size;
  j["query_year"] = pool.query_year;
  j["shortfall"] = pool.shortfall;
  j["pool_ids"] = pool.pool_ids;
  nlohmann::json queries = nlohmann::json::array();
  for (const auto& q : pool.queries)
    queries.push_back({{"query_id", q.query_id}, {"positives", q.positives}});
  j["queries"] = std::move(queries);
  return j;
}

inline PoolSet pool_from_json(const nlohmann::json& j) {
  try {
    PoolSet pool;
    pool.setup = parse_setup(j.at("setup").get<std::string>());
    if (auto it = j.find("field"); it != j.end() && !it->is_null()) {
      pool.field = parse_field(it->get<std::string>());
      if (!pool.field) throw Error("unknown_field", "unknown field in pool file");
    }
    pool.seed = j.at("seed").get<std::uint64_t>();
    pool.target_size = j.value("target_size", std::size_t{0});
    pool.query_year = j.value("query_year", 0);
    pool.shortfall = j.value("shortfall", false);
    pool.pool_ids = j.at("pool_ids").get<IdSet>();
    for (const auto& q : j.at("queries"))
      pool.queries.push_back({q.at("query_id").get<ArticleId>(), q.at("positives").get<IdSet>()});
    return pool;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed_pool", std::string("malformed pool file: ") + e.what());
  }
}

inline PoolSet load_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read pool file " + path);
  try {
    return pool_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("malformed_pool", path + ": " + e.what());
  }
}

}  // namespace citebench
