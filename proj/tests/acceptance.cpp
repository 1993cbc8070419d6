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

// Acceptance runner: one PASS/FAIL line per criterion. Tolerances are fixed
// here. Exits nonzero when any hard criterion fails; the ordering check only
// warns.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace citebench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kBm25RelTol = 1e-9;
constexpr double kMetricTol = 1e-12;
constexpr double kDenseTol = 1e-12;
constexpr double kBm25Seconds = 10.0;
constexpr double kPipelineSeconds = 120.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome bm25_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> ndocs(1, 100), nvocab(1, 12), len(0, 25), qlen(1, 6);
  std::uniform_real_distribution<double> k1(0.0, 3.0), b(0.0, 1.0);
  std::size_t mismatches = 0, scored = 0;
  for (int corpus = 0; corpus < 50; ++corpus) {
    const int vocab = nvocab(rng);
    std::uniform_int_distribution<int> word(0, vocab - 1);
    std::vector<Bm25Index::Document> docs;
    std::vector<oracle::Doc> odocs;
    for (int d = ndocs(rng) - 1; d >= 0; --d) {
      std::string text;
      for (int i = len(rng); i > 0; --i) text += "t" + std::to_string(word(rng)) + " ";
      const std::string id = "doc" + std::to_string(d);
      docs.emplace_back(id, text);
      odocs.push_back({id, oracle::segment_ascii(text)});
    }
    const auto ix = Bm25Index::build(docs);
    for (int query = 0; query < 5; ++query) {
      std::string qtext;
      for (int i = qlen(rng); i > 0; --i) qtext += "t" + std::to_string(word(rng)) + " ";
      const Bm25Params p{k1(rng), b(rng)};
      const auto got = ix.search(qtext, p, docs.size());
      const auto want = oracle::bm25_rank(odocs, oracle::segment_ascii(qtext), p.k1, p.b);
      if (got.size() != want.size()) {
        ++mismatches;
        continue;
      }
      for (std::size_t i = 0; i < got.size(); ++i, ++scored)
        if (got[i].id != want[i].first ||
            std::abs(got[i].score - want[i].second) > kBm25RelTol * std::abs(want[i].second))
          ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kBm25Seconds,
          std::to_string(scored) + " scored hits, " + std::to_string(mismatches) +
              " mismatches, " + fmt("%.2fs", secs)};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(1002);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> universe(2, 40);
    const int u = universe(rng);
    std::vector<ArticleId> all;
    for (int i = 0; i < u; ++i) all.push_back("d" + std::to_string(i));
    std::shuffle(all.begin(), all.end(), rng);
    const std::vector<ArticleId> ranked(all.begin(), all.begin() + static_cast<long>(rng() % (u + 1)));
    std::shuffle(all.begin(), all.end(), rng);
    const IdSet relevant(all.begin(), all.begin() + 1 + static_cast<long>(rng() % u));
    const std::size_t k = 1 + rng() % 30;
    if (std::abs(average_precision(ranked, relevant) -
                 oracle::to_double(oracle::average_precision(ranked, relevant))) > kMetricTol)
      ++bad;
    if (std::abs(ndcg(ranked, relevant) - static_cast<double>(oracle::ndcg(ranked, relevant))) >
        kMetricTol)
      ++bad;
    if (std::abs(recall_at_k(ranked, relevant, k) -
                 oracle::to_double(oracle::recall_at_k(ranked, relevant, k))) > kMetricTol)
      ++bad;
  }
  const std::vector<ArticleId> worked{"a", "c", "b"};
  const double ap = average_precision(worked, {"a", "b"});
  const double nd = ndcg(worked, {"a", "b"});
  const bool worked_ok = std::abs(ap - 0.833333) < 5e-7 && std::abs(nd - 0.919721) < 5e-7;
  return {bad == 0 && worked_ok, "3000 comparisons, " + std::to_string(bad) + " mismatches, AP " +
                                     fmt("%.6f", ap) + ", nDCG " + fmt("%.6f", nd)};
}

Outcome dense_exactness() {
  std::mt19937_64 rng(1003);
  std::normal_distribution<float> g(0, 1);
  std::size_t bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<float>> rows(200, std::vector<float>(16));
    std::vector<float> flat;
    std::vector<ArticleId> ids;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      ids.push_back("v" + std::to_string(1000 + r));
      for (auto& v : rows[r]) flat.push_back(v = g(rng));
    }
    const EmbeddingStore store(16, ids, flat);
    std::vector<float> q(16);
    for (auto& v : q) v = g(rng);
    const std::size_t k = 1 + rng() % 200;
    for (Metric m : {Metric::Cosine, Metric::Dot, Metric::Euclidean}) {
      const auto want = oracle::knn(rows, ids, q, m, k);
      for (std::size_t threads : {1, 2, 4, 7}) {
        const auto got = knn(store, q, k, m, {nullptr, nullptr, threads});
        if (got.size() != want.size()) {
          ++bad;
          continue;
        }
        for (std::size_t i = 0; i < got.size(); ++i)
          if (got[i].id != want[i].first || std::abs(got[i].score - want[i].second) > kDenseTol)
            ++bad;
      }
    }
  }
  return {bad == 0, "100 instances x 3 metrics x 4 thread counts, " + std::to_string(bad) +
                        " mismatches"};
}

Outcome pool_invariants() {
  SyntheticConfig cfg;
  cfg.articles = 10000;
  cfg.seed = 1004;
  const auto data = generate_synthetic(cfg);
  const Corpus& corpus = data.corpus;
  const auto graph = build_citation_graph(corpus);
  std::size_t violations = 0, pools = 0;
  for (std::uint64_t run = 0; run < 30; ++run) {
    const bool field_level = run % 2 == 1;
    const Field field = kFields[run % kFieldCount].field;
    SamplingPlan plan;
    plan.queries_per_unit = field_level ? 5 : 20;
    plan.rng_seed = derive_seed(run, "queries");
    const auto queries = field_level ? sample_queries(corpus, graph, plan, field)
                                     : sample_queries(corpus, graph, plan);
    const std::size_t size = std::size_t{500} << (run % 3);
    auto build = [&](std::uint64_t seed) {
      return field_level ? build_field_pool(corpus, graph, field, queries, size, seed)
                         : build_dataset_pool(corpus, graph, queries, size, seed);
    };
    for (const auto& pool : repeat_pools(build, 2, 100 * run)) {
      ++pools;
      IdSet positives;
      for (const auto& q : pool.queries) {
        for (const auto& c : graph.out(q.query_id))
          if (corpus.contains(c) && !pool.pool_ids.contains(c)) ++violations;
        positives.insert(q.positives.begin(), q.positives.end());
      }
      for (const auto& id : pool.pool_ids) {
        if (positives.contains(id)) continue;
        const auto& year = corpus.at(id).year;
        if (!year || *year > pool.query_year) ++violations;
      }
      if (pool.shortfall ? pool.pool_ids.size() >= size : pool.pool_ids.size() != size)
        ++violations;
      if (pool_to_json(build(pool.seed)) != pool_to_json(pool)) ++violations;
    }
  }
  return {violations == 0,
          std::to_string(pools) + " pools from 30 runs, " + std::to_string(violations) + " violations"};
}

std::unique_ptr<fixture::BenchSetup> g_setup;

const fixture::BenchSetup& bench_setup() {
  if (!g_setup) g_setup = fixture::bench_setup(6000, 5, {}, 1005, 4);
  return *g_setup;
}

Benchmark g_bench;

Outcome benchmark_structure() {
  static_assert(expected_pair_count(19, 200) == 247000);
  const auto& s = bench_setup();
  BenchmarkParams params;
  params.threads = 4;
  g_bench = build_benchmark(s.corpus, s.graph, s.queries, s.runs, params, 1005);
  std::size_t bad = 0;
  for (const auto& e : g_bench.entries) {
    const IdSet& cited = s.graph.out(e.query_id);
    if (e.positives.size() != 5) ++bad;
    for (const auto& p : e.positives)
      if (!cited.contains(p)) ++bad;
    if (e.negatives.size() != kCandidateTypes.size()) ++bad;
    IdSet seen = e.positives;
    for (const auto& [t, ids] : e.negatives) {
      if (ids.size() != 10) ++bad;
      for (const auto& id : ids)
        if (!seen.insert(id).second || cited.contains(id) || id == e.query_id) ++bad;
    }
  }
  const std::size_t pairs = g_bench.pair_count();
  return {bad == 0 && g_bench.entries.size() == 95 && pairs == expected_pair_count(19, 5) &&
              pairs == 6175,
          std::to_string(g_bench.entries.size()) + " entries, " + std::to_string(pairs) +
              " pairs, " + std::to_string(bad) + " violations; 19x200x65 = " +
              std::to_string(expected_pair_count(19, 200))};
}

Outcome diverse_selection() {
  std::mt19937_64 rng(1006);
  std::size_t bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Each model ranks a shared hard core plus model-specific noise; the
    // overlap pattern shifts with the trial's mixing weights.
    std::map<std::string, RetrievalRun> runs;
    Qrels qrels;
    for (int q = 0; q < 6; ++q) qrels["q" + std::to_string(q)] = {"p" + std::to_string(q)};
    for (int m = 0; m < 4; ++m) {
      const std::string name = "model" + std::to_string(m);
      auto& run = runs[name];
      run.model = name;
      const unsigned share = static_cast<unsigned>(rng() % 11);
      for (const auto& [q, rel] : qrels) {
        std::vector<ArticleId> ids{*rel.begin()};
        for (int i = 0; i < 12; ++i)
          ids.push_back(rng() % 10 < share ? "core" + std::to_string(rng() % 12)
                                           : name + "-" + std::to_string(rng() % 40));
        double score = 100;
        IdSet used;
        for (const auto& id : ids)
          if (used.insert(id).second) run.results[q].push_back({id, score -= 1});
      }
    }
    std::map<std::string, NegativeLists> lists;
    std::map<std::string, oracle::Lists> olists;
    for (const auto& [name, run] : runs) {
      lists[name] = top_negatives_per_model(run, qrels, 10);
      for (const auto& [q, ranked] : run.results)
        for (const auto& sid : ranked)
          if (!qrels[q].contains(sid.id) && olists[name][q].size() < 10)
            olists[name][q].push_back(sid.id);
    }
    auto got = select_diverse_models(lists, 3);
    auto want = oracle::diverse_models(olists, 3);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) ++bad;
  }
  return {bad == 0, "100 configurations, " + std::to_string(bad) + " disagreements"};
}

Outcome graph_walk() {
  std::mt19937_64 rng(1007);
  std::size_t bad = 0, queries = 0, overlaps = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus c = oracle::random_corpus(rng, 30, 0.1);
    const auto g = build_citation_graph(c);
    const auto o = oracle::graph_of(c);
    for (const auto& q : c.ids()) {
      if (g.out(q).empty()) continue;
      ++queries;
      IdSet exclude;
      for (int i = 0; i < 3; ++i) exclude.insert(c.ids()[rng() % c.size()]);
      bool shortfall = false;
      const auto want = oracle::graph_walk(o, q, 10, exclude, &shortfall);
      const auto got = graph_negatives(c, g, q, 10, exclude);
      if (std::vector<ArticleId>(got.ids.begin(), got.ids.end()) != want ||
          got.shortfall != shortfall)
        ++bad;
      for (const auto& ci : g.out(q)) {
        ++overlaps;
        const auto r = overlap_ratio(g, q, ci);
        if (oracle::Ratio(static_cast<long long>(r.shared), static_cast<long long>(r.total)) !=
            oracle::overlap(o, q, ci))
          ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(queries) + " walks, " + std::to_string(overlaps) +
                        " exact overlaps, " + std::to_string(bad) + " mismatches"};
}

Outcome random_is_easiest() {
  const auto& s = bench_setup();
  std::string detail;
  bool ok = true;
  for (const auto& m : s.models) {
    const auto per_type = candidate_type_breakdown(*m, g_bench, 4);
    const double random_map = per_type.at(CandidateType::RANDOM).mean.at("MAP");
    for (const auto& [type, r] : per_type)
      if (type != CandidateType::RANDOM && r.mean.at("MAP") >= random_map) {
        ok = false;
        detail += " " + m->name() + ":" + std::string(type_name(type));
      }
    for (const auto& [type, name] : g_bench.manifest.bindings)
      if (name == m->name() && per_type.at(type).mean.at("MAP") >= random_map) {
        ok = false;
        detail += " " + m->name() + ":own";
      }
  }
  return {ok, ok ? std::to_string(s.models.size()) + " models, RANDOM easiest for all"
                 : "not easiest for" + detail};
}

Outcome pipeline_determinism() {
  const fs::path root = fs::temp_directory_path() / "citebench-acceptance";
  fs::remove_all(root);
  const std::string config = std::string(CITEBENCH_SOURCE_DIR) + "/data/pipeline.json";
  double worst = 0;
  for (const char* tree : {"a", "b"}) {
    const auto t0 = Clock::now();
    const std::string cmd = std::string(CITEBENCH_CLI) + " pipeline --config " + config +
                            " --out " + (root / tree).string() + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "pipeline exited with an error"};
    worst = std::max(worst, seconds_since(t0));
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = root / "b" / fs::relative(e.path(), root / "a");
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  for (const auto& e : fs::recursive_directory_iterator(root / "b"))
    if (e.is_regular_file() && !fs::exists(root / "a" / fs::relative(e.path(), root / "b")))
      ++differ;
  fs::remove_all(root);
  return {files > 0 && differ == 0 && worst < kPipelineSeconds,
          std::to_string(files) + " files, " + std::to_string(differ) + " differ, slowest run " +
              fmt("%.1fs", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    bool hard;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "bm25-oracle", true, bm25_oracle},
      {2, "metric-oracle", true, metric_oracle},
      {3, "dense-exactness", true, dense_exactness},
      {4, "pool-invariants", true, pool_invariants},
      {5, "benchmark-structure", true, benchmark_structure},
      {6, "diverse-selection", true, diverse_selection},
      {7, "graph-walk", true, graph_walk},
      {8, "random-easiest", false, random_is_easiest},
      {9, "pipeline-determinism", true, pipeline_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const char* verdict = o.pass ? "PASS" : (c.hard ? "FAIL" : "WARN");
    std::cout << verdict << " " << c.number << " " << c.name << ": " << o.detail << std::endl;
    if (!o.pass && c.hard) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
