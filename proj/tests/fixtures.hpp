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

// Shared synthetic benchmark fixture: a prefiltered synthetic corpus, BM25
// plus the synthetic dense encoders, per-field queries and pools, and every
// model's run over them.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "citebench/citebench.hpp"

namespace fixture {

using namespace citebench;

struct BenchSetup {
  SyntheticData data;
  Corpus corpus;
  CitationGraph graph;
  std::unique_ptr<Bm25Index> index;
  std::vector<std::unique_ptr<RetrievalModel>> models;
  std::map<Field, std::vector<ArticleId>> queries;
  std::map<Field, PoolSet> pools;
  std::map<std::string, RetrievalRun> runs;
};

/// `fields` empty means all 19.
inline std::unique_ptr<BenchSetup> bench_setup(std::size_t articles, std::size_t per_field,
                                               std::vector<Field> fields, std::uint64_t seed,
                                               std::size_t threads = 1) {
  auto s = std::make_unique<BenchSetup>();
  SyntheticConfig cfg;
  cfg.articles = articles;
  cfg.seed = seed;
  s->data = generate_synthetic(cfg);
  const auto raw_graph = build_citation_graph(s->data.corpus);
  s->corpus = prefilter(s->data.corpus, raw_graph, {}).corpus;
  s->graph = build_citation_graph(s->corpus);
  s->index = std::make_unique<Bm25Index>(build_index(s->corpus));
  s->models.push_back(std::make_unique<Bm25Model>("bm25", s->corpus, *s->index, Bm25Params{}));
  for (const auto& [name, store] : s->data.embeddings)
    s->models.push_back(std::make_unique<DenseModel>(name, store));

  if (fields.empty())
    for (const auto& info : kFields) fields.push_back(info.field);
  IdSet taken;
  for (Field f : fields) {
    SamplingPlan plan;
    plan.queries_per_unit = per_field;
    plan.min_out_citations = 5;
    plan.exclusion_ids = taken;
    plan.rng_seed = derive_seed(seed, "queries", field_abbreviation(f));
    auto qs = sample_queries(s->corpus, s->graph, plan, f);
    taken.insert(qs.begin(), qs.end());
    IdSet cited;
    for (const auto& q : qs)
      for (const auto& c : s->graph.out(q)) cited.insert(c);
    s->pools.emplace(f, build_field_pool(s->corpus, s->graph, f, qs, cited.size() + 300, seed));
    s->queries[f] = std::move(qs);
  }
  for (const auto& m : s->models) {
    auto& merged = s->runs[m->name()];
    merged.model = m->name();
    merged.cutoff = 500;
    for (const auto& [f, pool] : s->pools)
      for (auto& [q, list] : run_retrieval(*m, pool, 500, threads).results)
        merged.results[q] = std::move(list);
  }
  return s;
}

}  // namespace fixture
