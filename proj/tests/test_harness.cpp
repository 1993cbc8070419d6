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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace citebench {
namespace {

/// Ranks by a fixed preference: listed ids first, in order, then the rest by id.
class ScriptedModel final : public RetrievalModel {
 public:
  explicit ScriptedModel(std::function<std::vector<ArticleId>(const ArticleId&, const IdSet&)> f)
      : f_(std::move(f)) {}
  const std::string& name() const override { return name_; }
  std::vector<ScoredId> rank(const ArticleId& q, const IdSet& candidates,
                             std::size_t k) const override {
    std::vector<ScoredId> out;
    double s = 0;
    for (const auto& id : f_(q, candidates))
      if (out.size() < k) out.push_back({id, s -= 1});
    return out;
  }

 private:
  std::string name_ = "scripted";
  std::function<std::vector<ArticleId>(const ArticleId&, const IdSet&)> f_;
};

BenchmarkEntry entry(const std::string& q, Field f) {
  BenchmarkEntry e{q, f, {}, {}};
  for (int i = 0; i < 5; ++i) e.positives.insert(q + "-p" + std::to_string(i));
  for (auto t : kCandidateTypes)
    for (int i = 0; i < 10; ++i)
      e.negatives[t].insert(q + "-" + std::string(type_name(t)) + std::to_string(i));
  return e;
}

std::vector<ArticleId> positives_first(const BenchmarkEntry& e, const IdSet& c, bool reverse) {
  std::vector<ArticleId> pos, neg;
  for (const auto& id : c) (e.positives.count(id) ? pos : neg).push_back(id);
  if (reverse) std::swap(pos, neg);
  pos.insert(pos.end(), neg.begin(), neg.end());
  return pos;
}

Benchmark toy_benchmark() {
  Benchmark b;
  b.entries = {entry("q1", Field::Art), entry("q2", Field::Art), entry("q3", Field::Physics)};
  return b;
}

const BenchmarkEntry& find_entry(const Benchmark& b, const ArticleId& q) {
  for (const auto& e : b.entries)
    if (e.query_id == q) return e;
  throw std::runtime_error("no entry");
}

TEST(EvaluateBenchmark, PerfectAndAdversarial) {
  const auto b = toy_benchmark();
  ScriptedModel perfect([&](const ArticleId& q, const IdSet& c) {
    return positives_first(find_entry(b, q), c, false);
  });
  const auto good = evaluate_benchmark(perfect, b);
  for (const auto& [f, r] : good.per_field) {
    EXPECT_EQ(r.mean.at("MAP"), 1.0);
    EXPECT_EQ(r.mean.at("R@5"), 1.0);
  }
  ScriptedModel worst([&](const ArticleId& q, const IdSet& c) {
    return positives_first(find_entry(b, q), c, true);
  });
  const auto bad = evaluate_benchmark(worst, b);
  EXPECT_EQ(bad.average.at("R@5"), 0.0);
}

TEST(EvaluateBenchmark, RandomRankerRecallNearFiveOverSixtyFive) {
  // Independent shuffler: std::shuffle with a std engine.
  const auto b = toy_benchmark();
  std::mt19937_64 rng(2024);
  ScriptedModel shuffler([&](const ArticleId&, const IdSet& c) {
    std::vector<ArticleId> v(c.begin(), c.end());
    std::shuffle(v.begin(), v.end(), rng);
    return v;
  });
  Benchmark one;
  one.entries = {b.entries[0]};
  double sum = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) sum += evaluate_benchmark(shuffler, one).average.at("R@5");
  EXPECT_NEAR(sum / trials, 5.0 / 65.0, 0.02);
}

TEST(EvaluateBenchmark, AverageIsMacroOverFields) {
  const auto b = toy_benchmark();
  // Perfect on q1 only.
  ScriptedModel m([&](const ArticleId& q, const IdSet& c) {
    return positives_first(find_entry(b, q), c, q != "q1");
  });
  const auto r = evaluate_benchmark(m, b);
  double sum = 0;
  for (const auto& [f, fr] : r.per_field) sum += fr.mean.at("MAP");
  EXPECT_NEAR(r.average.at("MAP"), sum / static_cast<double>(r.per_field.size()), 1e-12);
  EXPECT_EQ(r.per_field.at(Field::Art).per_query.size(), 2u);
}

TEST(Breakdown, PerfectAndAdversarialClosedForm) {
  const auto b = toy_benchmark();
  ScriptedModel perfect([&](const ArticleId& q, const IdSet& c) {
    return positives_first(find_entry(b, q), c, false);
  });
  for (const auto& [t, r] : candidate_type_breakdown(perfect, b)) EXPECT_EQ(r.mean.at("MAP"), 1.0);
  ScriptedModel worst([&](const ArticleId& q, const IdSet& c) {
    return positives_first(find_entry(b, q), c, true);
  });
  const oracle::Ratio ap =
      (oracle::Ratio(1, 11) + oracle::Ratio(2, 12) + oracle::Ratio(3, 13) + oracle::Ratio(4, 14) +
       oracle::Ratio(5, 15)) / 5;
  for (const auto& [t, r] : candidate_type_breakdown(worst, b)) {
    EXPECT_NEAR(r.mean.at("MAP"), oracle::to_double(ap), 1e-12);
    EXPECT_NEAR(r.mean.at("MAP"), 0.22148, 5e-6);
    EXPECT_EQ(r.mean.at("R@5"), 0.0);
  }
}

TEST(Breakdown, TypedPoolsHaveFifteenAndCoverEntry) {
  const auto e = entry("q", Field::Art);
  IdSet all;
  for (auto t : kCandidateTypes) {
    const auto p = typed_pool(e, t);
    EXPECT_EQ(p.size(), 15u);
    all.insert(p.begin(), p.end());
  }
  EXPECT_EQ(all, e.candidates());
}

struct SmallWorld {
  Corpus corpus;
  std::vector<std::pair<ArticleId, std::string>> docs;
  std::unique_ptr<Bm25Index> index;
  std::unique_ptr<EmbeddingStore> store;
  std::vector<std::vector<float>> rows;
  std::vector<ArticleId> ids;
};

SmallWorld small_world() {
  SmallWorld w;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> word(0, 9);
  std::normal_distribution<float> g(0, 1);
  std::vector<Article> v;
  std::vector<float> flat;
  for (int i = 0; i < 30; ++i) {
    Article a;
    char id[8];
    std::snprintf(id, sizeof id, "d%02d", i);
    a.id = id;
    a.year = 2018;
    for (int j = 0; j < 4; ++j) a.title += "w" + std::to_string(word(rng)) + " ";
    for (int j = 0; j < 8; ++j) a.abstract += "w" + std::to_string(word(rng)) + " ";
    std::vector<float> row(8);
    for (auto& x : row) flat.push_back(x = g(rng));
    w.rows.push_back(row);
    w.ids.push_back(a.id);
    v.push_back(std::move(a));
  }
  v[0].out_citations = {"d01", "d02", "d03"};
  v[0].year = 2019;
  w.corpus = Corpus(std::move(v));
  w.index = std::make_unique<Bm25Index>(build_index(w.corpus));
  w.store = std::make_unique<EmbeddingStore>(8, w.ids, flat);
  return w;
}

TEST(RunRetrieval, Bm25MatchesSearchThenZeroScoreTail) {
  const auto w = small_world();
  const auto g = build_citation_graph(w.corpus);
  const std::vector<ArticleId> qs{"d00"};
  const auto pool = build_dataset_pool(w.corpus, g, qs, 20, 1);
  const Bm25Model model("bm25", w.corpus, *w.index, {});
  const auto run = run_retrieval(model, pool, 500);
  const auto& got = run.results.at("d00");
  const ArticleId self = "d00";
  const auto want = w.index->search(w.corpus.at("d00").text(), {}, 500, &pool.pool_ids, &self);
  ASSERT_GE(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i].id, want[i].id);
    EXPECT_EQ(got[i].score, want[i].score);
  }
  EXPECT_EQ(got.size(), pool.pool_ids.size());  // query is not in its own pool
  for (std::size_t i = want.size(); i < got.size(); ++i) EXPECT_EQ(got[i].score, 0.0);
  IdSet uniq;
  for (const auto& s : got) EXPECT_TRUE(uniq.insert(s.id).second && pool.pool_ids.count(s.id));
  EXPECT_EQ(run_retrieval(model, pool, 5).results.at("d00").size(), 5u);
}

TEST(RunRetrieval, DenseMatchesExhaustiveKnn) {
  const auto w = small_world();
  const auto g = build_citation_graph(w.corpus);
  const std::vector<ArticleId> qs{"d00"};
  const auto pool = build_dataset_pool(w.corpus, g, qs, 20, 2);
  const DenseModel model("dense", *w.store, Metric::Cosine);
  std::vector<std::vector<float>> rows;
  std::vector<ArticleId> ids;
  for (std::size_t r = 0; r < w.ids.size(); ++r)
    if (pool.pool_ids.count(w.ids[r])) {
      rows.push_back(w.rows[r]);
      ids.push_back(w.ids[r]);
    }
  const auto want = oracle::knn(rows, ids, w.rows[0], Metric::Cosine, 500);
  for (std::size_t threads : {1, 4}) {
    const auto got = run_retrieval(model, pool, 500, threads).results.at("d00");
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].id, want[i].first);
  }
}

TEST(RunRetrieval, MissingRepresentationIsAnError) {
  const auto w = small_world();
  const EmbeddingStore partial(1, {"d01"}, {1.0f});
  const DenseModel model("dense", partial);
  PoolSet pool;
  pool.pool_ids = {"d01"};
  pool.queries = {{"d00", {"d01"}}};
  try {
    run_retrieval(model, pool, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "missing_representation");
  }
}

TEST(Report, FormattingAndEmptyTable) {
  EXPECT_EQ(format_percent(0.404), "40.4");
  EXPECT_EQ(format_percent(1.0), "100.0");
  ReportTable empty{"", "model", {"MAP"}, {}};
  EXPECT_EQ(render(empty, ReportFormat::Tsv), "model\tMAP\n");
  EXPECT_EQ(render(empty, ReportFormat::Markdown), "| model | MAP |\n|---|---:|\n");
}

TEST(Report, FieldTableGolden) {
  BenchmarkReport r;
  for (auto [f, map] : {std::pair{Field::Physics, 0.5}, {Field::Art, 0.25}}) {
    auto& fr = r.per_field[f];
    fr.mean = {{"MAP", map}, {"R@5", map / 2}};
  }
  r.average = {{"MAP", 0.375}, {"R@5", 0.1875}};
  const auto t = field_table("MAP", "MAP", {{"bm25", r}});
  EXPECT_EQ(render(t, ReportFormat::Markdown),
            "### MAP\n\n| model | Art | Phy | AVG |\n|---|---:|---:|---:|\n"
            "| bm25 | 25.0 | 50.0 | 37.5 |\n");
  EXPECT_EQ(render(t, ReportFormat::Tsv), "model\tArt\tPhy\tAVG\nbm25\t25.0\t50.0\t37.5\n");
}

TEST(Report, EmitWritesFileAndRejectsBadPath) {
  const auto path = std::filesystem::temp_directory_path() / "citebench-report-test.tsv";
  emit_report({{"", "model", {"MAP"}, {{"m", {0.5}}}}, {"", "model", {"R@5"}, {{"m", {std::nullopt}}}}},
              ReportFormat::Tsv, path.string());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "model\tMAP\nm\t50.0\n\nmodel\tR@5\nm\t-\n");
  std::filesystem::remove(path);
  EXPECT_THROW(emit_report({}, ReportFormat::Tsv, "/nonexistent-dir/x/y.tsv"), Error);
}

TEST(Report, TypeTableColumns) {
  const auto t = type_table("t", {});
  ASSERT_EQ(t.columns.size(), 12u);
  EXPECT_EQ(t.columns.front(), "BM25 MAP");
  EXPECT_EQ(t.columns.back(), "RANDOM R@5");
}

TEST(Synthetic, DeterministicAndPrefilterable) {
  SyntheticConfig cfg;
  cfg.articles = 500;
  const auto a = generate_synthetic(cfg), b = generate_synthetic(cfg);
  std::ostringstream x, y;
  write_corpus(x, a.corpus);
  write_corpus(y, b.corpus);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(a.embeddings.size(), 3u);
  for (const auto& [name, store] : a.embeddings) EXPECT_EQ(store.size(), a.corpus.size());
  const auto pf = prefilter(a.corpus, build_citation_graph(a.corpus), {});
  EXPECT_GT(pf.stats.missing_year + pf.stats.empty_title + pf.stats.short_abstract, 0u);
  EXPECT_GT(pf.stats.kept, 300u);
}

}  // namespace
}  // namespace citebench
