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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citebench/citebench.hpp"
#include "run_config.hpp"

namespace citebench::cli {

namespace fs = std::filesystem;

inline constexpr const char* kTool = "citebench";

/// Collects the files a command writes and finishes with a manifest that
/// lists each file's content hash plus the config hash and tool version.
class OutputTree {
 public:
  OutputTree(const RunConfig& cfg, std::string command)
      : root_(cfg.out), command_(std::move(command)), config_hash_(cli::config_hash(cfg)) {
    if (root_.empty()) throw Error("invalid_config", "--out is required");
    fs::create_directories(root_);
    config_ = to_json(cfg);
    config_.erase("out");
    config_.erase("threads");
  }

  const std::string& hash() const { return config_hash_; }

  nlohmann::json stamp() const {
    return {{"tool", kTool}, {"version", kVersion}, {"config_hash", config_hash_}};
  }

  std::string path(const std::string& rel) const {
    const fs::path p = fs::path(root_) / rel;
    fs::create_directories(p.parent_path());
    return p.string();
  }

  void write_text(const std::string& rel, const std::string& content) {
    std::ofstream out(path(rel), std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path(rel));
    out << content;
    out.close();
    if (!out) throw Error("io", "failed writing " + path(rel));
    record(rel);
  }

  /// JSON objects get a "manifest" stamp before writing.
  void write_json(const std::string& rel, nlohmann::json j) {
    if (j.is_object()) j["manifest"] = stamp();
    write_text(rel, j.dump(2) + "\n");
  }

  /// Registers a file written directly under the output root.
  void record(const std::string& rel) { outputs_[rel] = file_content_hash(path(rel)); }

  void finish(const std::string& manifest_name, nlohmann::json extra = nlohmann::json::object()) {
    nlohmann::json m = stamp();
    m["command"] = command_;
    m["config"] = config_;
    m["outputs"] = outputs_;
    for (auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream out(path(manifest_name), std::ios::binary);
    out << m.dump(2) << "\n";
    if (!out) throw Error("io", "failed writing manifest");
  }

 private:
  std::string root_;
  std::string command_;
  std::string config_hash_;
  nlohmann::json config_;
  std::map<std::string, std::string> outputs_;
};

inline std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw Error("missing_seed", "a --seed is required (no wall-clock seeding)");
  return *cfg.seed;
}

inline void require_corpus(const RunConfig& cfg) {
  if (cfg.corpus.empty()) throw Error("invalid_config", "--corpus is required");
  if (!fs::exists(cfg.corpus)) throw Error("missing_input", "corpus not found: " + cfg.corpus);
}

/// The prefiltered corpus and a citation graph over it.
struct Workspace {
  Corpus raw;
  CitationGraph raw_graph;
  PrefilterStats stats;
  Corpus corpus;
  CitationGraph graph;
  std::string corpus_hash;
};

inline std::unique_ptr<Workspace> load_workspace(const RunConfig& cfg) {
  require_corpus(cfg);
  auto ws = std::make_unique<Workspace>();
  ws->raw = load_corpus(cfg.corpus, {cfg.max_rejects});
  ws->raw_graph = build_citation_graph(ws->raw);
  ws->corpus_hash = file_content_hash(cfg.corpus);
  if (cfg.prefiltered) {
    ws->corpus = ws->raw;
    ws->stats.input = ws->stats.kept = ws->raw.size();
  } else {
    auto result = prefilter(ws->raw, ws->raw_graph, cfg.prefilter);
    ws->corpus = std::move(result.corpus);
    ws->stats = result.stats;
  }
  ws->graph = build_citation_graph(ws->corpus);
  return ws;
}

/// BM25 over the prefiltered corpus plus one dense model per embedding file.
struct ModelSet {
  std::unique_ptr<Bm25Index> index;
  std::map<std::string, EmbeddingStore> stores;
  std::vector<std::unique_ptr<RetrievalModel>> models;

  const RetrievalModel& get(const std::string& name) const {
    for (const auto& m : models)
      if (m->name() == name) return *m;
    throw Error("unknown_model", "no model named " + name);
  }
};

inline std::unique_ptr<ModelSet> load_models(const RunConfig& cfg, const Workspace& ws,
                                             const Bm25Params& params) {
  auto set = std::make_unique<ModelSet>();
  set->index = std::make_unique<Bm25Index>(build_index(ws.corpus));
  set->models.push_back(std::make_unique<Bm25Model>("bm25", ws.corpus, *set->index, params));
  const Metric metric = parse_metric(cfg.metric);
  for (const auto& [name, path] : cfg.embeddings) {
    if (name == "bm25") throw Error("invalid_config", "embedding name 'bm25' is reserved");
    if (!fs::exists(path)) throw Error("missing_input", "embedding file not found: " + path);
    set->stores.emplace(name, load_embeddings(path, embedding_manifest_path(path)));
  }
  for (const auto& [name, store] : set->stores)
    set->models.push_back(std::make_unique<DenseModel>(name, store, metric));
  return set;
}

inline std::string pool_stem(const PoolSet& pool, std::size_t repetition) {
  std::string stem(setup_name(pool.setup));
  if (pool.field) stem += "-" + std::string(field_abbreviation(*pool.field));
  return stem + "-" + std::to_string(pool.target_size) + "-r" + std::to_string(repetition);
}

/// "dataset-2000-r1" -> "dataset-2000".
inline std::string pool_family(const std::string& stem) {
  auto pos = stem.rfind("-r");
  if (pos == std::string::npos) return stem;
  for (std::size_t i = pos + 2; i < stem.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(stem[i]))) return stem;
  return pos + 2 < stem.size() ? stem.substr(0, pos) : stem;
}

inline std::vector<Field> selected_fields(const RunConfig& cfg) {
  std::vector<Field> out;
  if (cfg.fields.empty()) {
    for (const auto& info : kFields) out.push_back(info.field);
    return out;
  }
  for (const auto& label : cfg.fields) {
    auto f = parse_field(label);
    if (!f) throw Error("unknown_field", "unknown field label: " + label);
    out.push_back(*f);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Queries per field, sampled in field order; a query picked for one field
/// is excluded from later fields.
inline std::map<Field, std::vector<ArticleId>> sample_field_queries(
    const Workspace& ws, const RunConfig& cfg, std::size_t per_field,
    std::size_t min_citations, std::string_view tag) {
  std::map<Field, std::vector<ArticleId>> out;
  IdSet taken;
  for (Field f : selected_fields(cfg)) {
    SamplingPlan plan;
    plan.query_year = cfg.query_year;
    plan.queries_per_unit = per_field;
    plan.min_out_citations = min_citations;
    plan.exclusion_ids = taken;
    plan.rng_seed = derive_seed(require_seed(cfg), tag, field_abbreviation(f));
    auto queries = sample_queries(ws.corpus, ws.graph, plan, f);
    taken.insert(queries.begin(), queries.end());
    out[f] = std::move(queries);
  }
  return out;
}

inline Bm25Params bm25_params_from(const RunConfig& cfg) {
  Bm25Params p{cfg.k1, cfg.b};
  if (!cfg.bm25_params.empty()) {
    std::ifstream in(cfg.bm25_params);
    if (!in) throw Error("missing_input", "cannot read bm25 params " + cfg.bm25_params);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("k1") || !j.contains("b"))
      throw Error("invalid_config", "malformed bm25 params file " + cfg.bm25_params);
    p = {j["k1"].get<double>(), j["b"].get<double>()};
  }
  p.validate();
  return p;
}

inline std::vector<ValidationQuery> validation_from(const Workspace& ws, const PoolSet& pool) {
  std::vector<ValidationQuery> out;
  for (const auto& q : pool.queries)
    if (!q.positives.empty()) out.push_back({ws.corpus.at(q.query_id).text(), q.positives, q.query_id});
  return out;
}

inline nlohmann::json tune_bm25(const Workspace& ws, const PoolSet& pool, const RunConfig& cfg,
                                Bm25Params& chosen) {
  const Bm25Index index = build_index(ws.corpus);
  const auto validation = validation_from(ws, pool);
  const auto grid = default_tuning_grid();
  TuneOptions options;
  options.cutoff = cfg.cutoff;
  const auto result = tune_params(index, validation, &pool.pool_ids, grid, options);
  chosen = result.best;
  return {{"k1", result.best.k1},
          {"b", result.best.b},
          {"objective", "MAP"},
          {"value", result.best_value},
          {"grid_points", grid.size()},
          {"validation_queries", validation.size()}};
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the one-line summary printed on success.

inline std::string cmd_ingest(const RunConfig& cfg) {
  require_corpus(cfg);
  OutputTree out(cfg, "ingest");
  const Corpus corpus = load_corpus(cfg.corpus, {cfg.max_rejects});
  const CitationGraph graph = build_citation_graph(corpus);
  nlohmann::json fields = nlohmann::json::object();
  std::size_t unknown_labels = 0;
  for (const auto& info : kFields) fields[std::string(info.abbreviation)] = 0;
  for (const auto& a : corpus.articles()) {
    for (Field f : a.fields) fields[std::string(field_abbreviation(f))] = fields[std::string(field_abbreviation(f))].get<std::size_t>() + 1;
    unknown_labels += a.raw_fields.size();
  }
  out.write_json("ingest.json", {{"articles", corpus.size()},
                                 {"rejected_lines", corpus.rejected_lines()},
                                 {"citation_edges", graph.edge_count()},
                                 {"dangling_edges", graph.dangling_edges()},
                                 {"field_counts", fields},
                                 {"unknown_field_labels", unknown_labels},
                                 {"corpus_hash", file_content_hash(cfg.corpus)}});
  out.finish("ingest.manifest.json");
  return "ingest: " + std::to_string(corpus.size()) + " articles, " +
         std::to_string(corpus.rejected_lines()) + " rejected lines, " +
         std::to_string(graph.dangling_edges()) + " dangling citations";
}

inline nlohmann::json prefilter_json(const PrefilterStats& s) {
  return {{"input", s.input},           {"missing_year", s.missing_year},
          {"empty_title", s.empty_title}, {"short_abstract", s.short_abstract},
          {"few_citations", s.few_citations}, {"kept", s.kept}};
}

inline std::string write_prefilter(const Workspace& ws, OutputTree& out) {
  std::ostringstream body;
  write_corpus(body, ws.corpus);
  out.write_text("prefiltered.jsonl", body.str());
  out.write_json("prefilter.json", {{"stats", prefilter_json(ws.stats)}});
  return "prefilter: kept " + std::to_string(ws.stats.kept) + " of " +
         std::to_string(ws.stats.input) + " articles";
}

inline std::string cmd_prefilter(const RunConfig& cfg) {
  auto ws = load_workspace(cfg);
  OutputTree out(cfg, "prefilter");
  auto summary = write_prefilter(*ws, out);
  out.finish("prefilter.manifest.json", {{"corpus_hash", ws->corpus_hash}});
  return summary;
}

/// Builds every pool requested by the config, keyed by file stem.
inline std::map<std::string, PoolSet> build_pools(const Workspace& ws, const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  std::map<std::string, PoolSet> pools;
  auto add = [&](const std::vector<PoolSet>& reps) {
    for (std::size_t i = 0; i < reps.size(); ++i) pools.emplace(pool_stem(reps[i], i), reps[i]);
  };
  if (parse_setup(cfg.setup) == PoolSetup::Dataset) {
    SamplingPlan plan;
    plan.query_year = cfg.query_year;
    plan.queries_per_unit = cfg.queries;
    plan.rng_seed = derive_seed(seed, "queries", "dataset");
    const auto queries = sample_queries(ws.corpus, ws.graph, plan);
    for (std::size_t size : cfg.sizes)
      add(repeat_pools(
          [&](std::uint64_t s) {
            return build_dataset_pool(ws.corpus, ws.graph, queries, size, s, cfg.query_year);
          },
          cfg.repetitions, seed));
  } else {
    const auto by_field = sample_field_queries(ws, cfg, cfg.queries, 1, "queries");
    for (const auto& [field, queries] : by_field)
      for (std::size_t size : cfg.sizes)
        add(repeat_pools(
            [&](std::uint64_t s) {
              return build_field_pool(ws.corpus, ws.graph, field, queries, size, s,
                                      cfg.query_year);
            },
            cfg.repetitions, seed));
  }
  return pools;
}

inline void write_pool(OutputTree& out, const std::string& rel, const PoolSet& pool) {
  out.write_json(rel, pool_to_json(pool));
}

inline std::string cmd_pool(const RunConfig& cfg) {
  require_seed(cfg);
  auto ws = load_workspace(cfg);
  OutputTree out(cfg, "pool");
  const auto pools = build_pools(*ws, cfg);
  std::size_t shortfalls = 0;
  for (const auto& [stem, pool] : pools) {
    write_pool(out, "pools/" + stem + ".json", pool);
    shortfalls += pool.shortfall;
  }
  out.finish("pool.manifest.json", {{"corpus_hash", ws->corpus_hash}});
  return "pool: wrote " + std::to_string(pools.size()) + " pool files (" +
         std::to_string(shortfalls) + " with shortfall)";
}

inline std::vector<std::pair<std::string, PoolSet>> load_pools(const RunConfig& cfg) {
  if (cfg.pools.empty()) throw Error("missing_input", "at least one --pool file is required");
  std::vector<std::pair<std::string, PoolSet>> out;
  for (const auto& p : cfg.pools) {
    if (!fs::exists(p)) throw Error("missing_input", "pool file not found: " + p);
    out.emplace_back(fs::path(p).stem().string(), load_pool(p));
  }
  return out;
}

inline std::string cmd_tune(const RunConfig& cfg) {
  auto ws = load_workspace(cfg);
  const auto pools = load_pools(cfg);
  OutputTree out(cfg, "tune");
  Bm25Params best;
  auto result = tune_bm25(*ws, pools.front().second, cfg, best);
  result["pool"] = pools.front().first;
  out.write_json("bm25.json", result);
  out.finish("tune.manifest.json", {{"corpus_hash", ws->corpus_hash}});
  char buf[128];
  std::snprintf(buf, sizeof buf, "tune: k1=%.1f b=%.1f MAP=%.4f", best.k1, best.b,
                result["value"].get<double>());
  return buf;
}

inline std::string run_file(const std::string& model, const std::string& pool_stem) {
  return "runs/" + model + "__" + pool_stem + ".tsv";
}

inline void write_run_file(OutputTree& out, const std::string& rel, const RetrievalRun& run) {
  std::ostringstream body;
  write_run(body, run);
  out.write_text(rel, body.str());
}

inline std::string cmd_run(const RunConfig& cfg) {
  auto ws = load_workspace(cfg);
  const auto pools = load_pools(cfg);
  OutputTree out(cfg, "run");
  Bm25Params params = bm25_params_from(cfg);
  nlohmann::json tuned;
  if (cfg.tune) tuned = tune_bm25(*ws, pools.front().second, cfg, params);
  auto models = load_models(cfg, *ws, params);
  std::size_t files = 0;
  for (const auto& [stem, pool] : pools)
    for (const auto& model : models->models) {
      write_run_file(out, run_file(model->name(), stem),
                     run_retrieval(*model, pool, cfg.cutoff, cfg.threads));
      ++files;
    }
  nlohmann::json extra{{"corpus_hash", ws->corpus_hash},
                       {"bm25", {{"k1", params.k1}, {"b", params.b}}}};
  if (cfg.tune) extra["tuning"] = tuned;
  out.finish("run.manifest.json", extra);
  return "run: wrote " + std::to_string(files) + " run files";
}

struct EvalRow {
  std::string model;
  std::string family;
  std::vector<MetricsReport> repetitions;
};

/// Groups per-repetition reports by (family, model) and renders the mean.
inline nlohmann::json write_eval_tables(OutputTree& out, const std::string& stem,
                                        const std::vector<EvalRow>& rows,
                                        std::size_t recall_cutoff) {
  const std::vector<std::string> metrics{"MAP", "nDCG", recall_name(recall_cutoff)};
  std::map<std::string, std::vector<std::pair<std::string, std::map<std::string, double>>>>
      by_family;
  nlohmann::json detail = nlohmann::json::object();
  for (const auto& row : rows) {
    std::map<std::string, double> means;
    nlohmann::json entry;
    for (const auto& m : metrics) {
      std::vector<double> values;
      for (const auto& rep : row.repetitions) values.push_back(rep.mean.at(m));
      const auto ms = mean_std(values);
      means[m] = ms.mean;
      entry[m] = {{"mean", ms.mean}, {"std", ms.stddev}, {"values", values}};
    }
    entry["queries"] = row.repetitions.empty() ? 0 : row.repetitions.front().per_query.size();
    detail[row.family][row.model] = entry;
    by_family[row.family].emplace_back(row.model, std::move(means));
  }
  std::vector<ReportTable> tables;
  for (const auto& [family, family_rows] : by_family)
    tables.push_back(metrics_table(family, family_rows, metrics));
  emit_report(tables, ReportFormat::Tsv, out.path(stem + ".tsv"));
  out.record(stem + ".tsv");
  emit_report(tables, ReportFormat::Markdown, out.path(stem + ".md"));
  out.record(stem + ".md");
  out.write_json(stem + ".json", {{"results", detail}});
  return detail;
}

inline std::string cmd_eval(const RunConfig& cfg) {
  const auto pools = load_pools(cfg);
  if (cfg.runs.empty()) throw Error("missing_input", "at least one --run file is required");
  OutputTree out(cfg, "eval");
  std::map<std::pair<std::string, std::string>, EvalRow> grouped;
  for (const auto& path : cfg.runs) {
    if (!fs::exists(path)) throw Error("missing_input", "run file not found: " + path);
    const std::string stem = fs::path(path).stem().string();
    const auto sep = stem.find("__");
    const std::string model = sep == std::string::npos ? stem : stem.substr(0, sep);
    const std::string pool_name = sep == std::string::npos ? "" : stem.substr(sep + 2);
    const PoolSet* pool = nullptr;
    for (const auto& [pstem, p] : pools)
      if (pstem == pool_name) pool = &p;
    if (pool == nullptr && pools.size() == 1) pool = &pools.front().second;
    if (pool == nullptr)
      throw Error("missing_input", "no --pool file matches run " + path);
    const auto run = load_run(path, model);
    const std::string family = pool_family(pool_name.empty() ? pools.front().first : pool_name);
    auto& row = grouped[{family, model}];
    row.model = model;
    row.family = family;
    row.repetitions.push_back(evaluate_run(run, pool->qrels(), cfg.recall_cutoff));
  }
  std::vector<EvalRow> rows;
  for (auto& [key, row] : grouped) rows.push_back(std::move(row));
  write_eval_tables(out, "eval", rows, cfg.recall_cutoff);
  out.finish("eval.manifest.json");
  return "eval: evaluated " + std::to_string(cfg.runs.size()) + " runs";
}

/// Field-level stage shared by `benchgen` and `pipeline`: per-field queries
/// and pools, every model's run over them, and the merged per-model runs.
struct FieldStage {
  std::map<Field, std::vector<ArticleId>> queries;
  std::map<Field, PoolSet> pools;
  std::map<std::string, std::map<Field, RetrievalRun>> runs;  // model -> field -> run
  std::map<std::string, RetrievalRun> merged;                 // model -> run over all fields
};

inline FieldStage run_field_stage(const Workspace& ws, const ModelSet& models,
                                  const RunConfig& cfg, OutputTree& out,
                                  const std::string& prefix) {
  const std::uint64_t seed = require_seed(cfg);
  FieldStage stage;
  stage.queries = sample_field_queries(ws, cfg, cfg.bench_queries, cfg.bench.positives,
                                       "field-queries");
  const std::size_t cutoff = std::max(cfg.cutoff, cfg.bench.model_depth);
  for (const auto& [field, queries] : stage.queries) {
    auto pool = build_field_pool(ws.corpus, ws.graph, field, queries, cfg.field_size, seed,
                                 cfg.query_year);
    const std::string stem = pool_stem(pool, 0);
    write_pool(out, prefix + "pools/" + stem + ".json", pool);
    for (const auto& model : models.models) {
      auto run = run_retrieval(*model, pool, cutoff, cfg.threads);
      write_run_file(out, prefix + run_file(model->name(), stem), run);
      auto& merged = stage.merged[model->name()];
      merged.model = model->name();
      merged.cutoff = cutoff;
      for (const auto& [q, ranked] : run.results) merged.results[q] = ranked;
      stage.runs[model->name()][field] = std::move(run);
    }
    stage.pools.emplace(field, std::move(pool));
  }
  return stage;
}

inline Benchmark generate_benchmark(const Workspace& ws, const FieldStage& stage,
                                    const RunConfig& cfg, OutputTree& out,
                                    const std::string& prefix) {
  BenchmarkParams params = cfg.bench;
  params.threads = cfg.threads;
  auto bench = build_benchmark(ws.corpus, ws.graph, stage.queries, stage.merged, params,
                               derive_seed(require_seed(cfg), "benchgen"));
  bench.manifest.corpus_hash = ws.corpus_hash;
  std::ostringstream body;
  write_benchmark(body, bench);
  out.write_text(prefix + "benchmark.jsonl", body.str());
  auto manifest = manifest_to_json(bench.manifest);
  manifest["entries"] = bench.entries.size();
  manifest["pairs"] = bench.pair_count();
  out.write_json(prefix + "benchmark.manifest.json", manifest);
  return bench;
}

inline std::string cmd_benchgen(const RunConfig& cfg) {
  require_seed(cfg);
  auto ws = load_workspace(cfg);
  OutputTree out(cfg, "benchgen");
  auto models = load_models(cfg, *ws, bm25_params_from(cfg));
  const auto stage = run_field_stage(*ws, *models, cfg, out, "");
  const auto bench = generate_benchmark(*ws, stage, cfg, out, "");
  out.finish("benchgen.manifest.json", {{"corpus_hash", ws->corpus_hash}});
  return "benchgen: " + std::to_string(bench.entries.size()) + " entries, " +
         std::to_string(bench.pair_count()) + " query-candidate pairs, " +
         std::to_string(bench.manifest.dropped) + " queries dropped";
}

inline Benchmark load_benchmark_input(const RunConfig& cfg) {
  if (cfg.benchmark.empty()) throw Error("missing_input", "--benchmark is required");
  if (!fs::exists(cfg.benchmark))
    throw Error("missing_input", "benchmark file not found: " + cfg.benchmark);
  return load_benchmark(cfg.benchmark);
}

inline void write_benchmark_report(const ModelSet& models, const Benchmark& bench,
                                   const RunConfig& cfg, OutputTree& out,
                                   const std::string& prefix) {
  std::vector<std::pair<std::string, BenchmarkReport>> rows;
  for (const auto& model : models.models)
    rows.emplace_back(model->name(), evaluate_benchmark(*model, bench, cfg.threads));
  const std::vector<ReportTable> tables{field_table("MAP", "MAP", rows),
                                        field_table("R@5", "R@5", rows)};
  emit_report(tables, ReportFormat::Markdown, out.path(prefix + "report.md"));
  out.record(prefix + "report.md");
  emit_report({tables[0]}, ReportFormat::Tsv, out.path(prefix + "report_map.tsv"));
  out.record(prefix + "report_map.tsv");
  emit_report({tables[1]}, ReportFormat::Tsv, out.path(prefix + "report_r5.tsv"));
  out.record(prefix + "report_r5.tsv");
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [model, r] : rows) {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [f, fr] : r.per_field)
      fields[std::string(field_abbreviation(f))] = fr.mean;
    j[model] = {{"fields", fields}, {"AVG", r.average}};
  }
  out.write_json(prefix + "report.json", {{"results", j}});
}

inline void write_breakdown(const ModelSet& models, const Benchmark& bench, const RunConfig& cfg,
                            OutputTree& out, const std::string& prefix) {
  std::vector<std::pair<std::string, std::map<CandidateType, MetricsReport>>> rows;
  for (const auto& model : models.models)
    rows.emplace_back(model->name(), candidate_type_breakdown(*model, bench, cfg.threads));
  const auto table = type_table("Candidate types", rows);
  emit_report({table}, ReportFormat::Markdown, out.path(prefix + "breakdown.md"));
  out.record(prefix + "breakdown.md");
  emit_report({table}, ReportFormat::Tsv, out.path(prefix + "breakdown.tsv"));
  out.record(prefix + "breakdown.tsv");
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [model, per_type] : rows)
    for (const auto& [t, r] : per_type) j[model][std::string(type_name(t))] = r.mean;
  out.write_json(prefix + "breakdown.json", {{"results", j}});
}

inline std::string cmd_report(const RunConfig& cfg) {
  auto ws = load_workspace(cfg);
  const auto bench = load_benchmark_input(cfg);
  OutputTree out(cfg, "report");
  auto models = load_models(cfg, *ws, bm25_params_from(cfg));
  write_benchmark_report(*models, bench, cfg, out, "");
  out.finish("report.manifest.json", {{"corpus_hash", ws->corpus_hash}});
  return "report: evaluated " + std::to_string(models->models.size()) + " models on " +
         std::to_string(bench.entries.size()) + " benchmark entries";
}

inline std::string cmd_breakdown(const RunConfig& cfg) {
  auto ws = load_workspace(cfg);
  const auto bench = load_benchmark_input(cfg);
  OutputTree out(cfg, "breakdown");
  auto models = load_models(cfg, *ws, bm25_params_from(cfg));
  write_breakdown(*models, bench, cfg, out, "");
  out.finish("breakdown.manifest.json", {{"corpus_hash", ws->corpus_hash}});
  return "breakdown: " + std::to_string(models->models.size()) + " models x " +
         std::to_string(kCandidateTypes.size()) + " candidate types";
}

/// Every stage end to end into one output tree.
inline std::string cmd_pipeline(const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  auto ws = load_workspace(cfg);
  OutputTree out(cfg, "pipeline");
  write_prefilter(*ws, out);

  RunConfig dataset_cfg = cfg;
  dataset_cfg.setup = "dataset";
  const auto pools = build_pools(*ws, dataset_cfg);
  for (const auto& [stem, pool] : pools) write_pool(out, "dataset/pools/" + stem + ".json", pool);

  Bm25Params params = bm25_params_from(cfg);
  if (cfg.tune) {
    auto tuned = tune_bm25(*ws, pools.begin()->second, cfg, params);
    tuned["pool"] = pools.begin()->first;
    out.write_json("dataset/bm25.json", tuned);
  }
  auto models = load_models(cfg, *ws, params);

  std::map<std::pair<std::string, std::string>, EvalRow> grouped;
  for (const auto& [stem, pool] : pools)
    for (const auto& model : models->models) {
      const auto run = run_retrieval(*model, pool, cfg.cutoff, cfg.threads);
      write_run_file(out, "dataset/" + run_file(model->name(), stem), run);
      auto& row = grouped[{pool_family(stem), model->name()}];
      row.model = model->name();
      row.family = pool_family(stem);
      row.repetitions.push_back(evaluate_run(run, pool.qrels(), cfg.recall_cutoff));
    }
  std::vector<EvalRow> rows;
  for (auto& [key, row] : grouped) rows.push_back(std::move(row));
  write_eval_tables(out, "dataset/eval", rows, cfg.recall_cutoff);

  const auto stage = run_field_stage(*ws, *models, cfg, out, "field/");
  std::vector<std::string> metric_names{"MAP", "nDCG", recall_name(cfg.recall_cutoff)};
  std::vector<std::pair<std::string, BenchmarkReport>> field_rows;
  for (const auto& model : models->models) {
    BenchmarkReport r;
    r.metrics = metric_names;
    for (const auto& [field, run] : stage.runs.at(model->name()))
      r.per_field[field] = evaluate_run(run, stage.pools.at(field).qrels(), cfg.recall_cutoff);
    for (const auto& m : metric_names) {
      double sum = 0.0;
      for (const auto& [f, fr] : r.per_field) sum += fr.mean.at(m);
      r.average[m] = r.per_field.empty() ? 0.0 : sum / static_cast<double>(r.per_field.size());
    }
    field_rows.emplace_back(model->name(), std::move(r));
  }
  std::vector<ReportTable> field_tables;
  for (const auto& m : metric_names) field_tables.push_back(field_table(m, m, field_rows));
  emit_report(field_tables, ReportFormat::Markdown, out.path("field/eval.md"));
  out.record("field/eval.md");
  emit_report(field_tables, ReportFormat::Tsv, out.path("field/eval.tsv"));
  out.record("field/eval.tsv");

  const auto bench = generate_benchmark(*ws, stage, cfg, out, "benchmark/");
  write_benchmark_report(*models, bench, cfg, out, "benchmark/");
  write_breakdown(*models, bench, cfg, out, "benchmark/");

  out.finish("manifest.json", {{"corpus_hash", ws->corpus_hash}, {"seed", seed}});
  return "pipeline: " + std::to_string(ws->corpus.size()) + " prefiltered articles, " +
         std::to_string(pools.size()) + " dataset pools, " +
         std::to_string(bench.entries.size()) + " benchmark entries (" +
         std::to_string(bench.pair_count()) + " pairs)";
}

inline std::string cmd_synth(const RunConfig& cfg, std::size_t articles) {
  SyntheticConfig sc;
  sc.articles = articles;
  sc.seed = require_seed(cfg);
  sc.query_year = cfg.query_year;
  sc.last_year = cfg.query_year + 2;
  const auto data = generate_synthetic(sc);
  OutputTree out(cfg, "synth");
  std::ostringstream body;
  write_corpus(body, data.corpus);
  out.write_text("corpus.jsonl", body.str());
  for (const auto& [name, store] : data.embeddings) {
    save_embeddings(store, out.path(name + ".f32"), out.path(name + ".json"));
    out.record(name + ".f32");
    out.record(name + ".json");
  }
  out.finish("synth.manifest.json");
  return "synth: " + std::to_string(data.corpus.size()) + " articles, " +
         std::to_string(data.embeddings.size()) + " embedding sets";
}

}  // namespace citebench::cli
