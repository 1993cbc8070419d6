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

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace {

using citebench::Error;
using citebench::cli::RunConfig;

/// Raw flag values. Only flags the user actually passed override the config.
struct Flags {
  std::string config;
  std::string corpus;
  std::vector<std::string> embeddings;
  std::string metric;
  std::string setup;
  std::vector<std::string> fields;
  std::vector<std::size_t> sizes;
  std::size_t field_size = 0;
  std::size_t queries = 0;
  std::size_t bench_queries = 0;
  int query_year = 0;
  std::size_t repetitions = 0;
  std::size_t cutoff = 0;
  std::size_t recall_cutoff = 0;
  double k1 = 0;
  double b = 0;
  bool tune = false;
  bool prefiltered = false;
  std::size_t max_rejects = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 0;
  std::vector<std::string> pools;
  std::vector<std::string> runs;
  std::string benchmark;
  std::string bm25_params;
  std::size_t articles = 1000;
};

struct Options {
  CLI::Option* corpus = nullptr;
  CLI::Option* embeddings = nullptr;
  CLI::Option* metric = nullptr;
  CLI::Option* setup = nullptr;
  CLI::Option* fields = nullptr;
  CLI::Option* sizes = nullptr;
  CLI::Option* field_size = nullptr;
  CLI::Option* queries = nullptr;
  CLI::Option* bench_queries = nullptr;
  CLI::Option* query_year = nullptr;
  CLI::Option* repetitions = nullptr;
  CLI::Option* cutoff = nullptr;
  CLI::Option* recall_cutoff = nullptr;
  CLI::Option* k1 = nullptr;
  CLI::Option* b = nullptr;
  CLI::Option* tune = nullptr;
  CLI::Option* prefiltered = nullptr;
  CLI::Option* max_rejects = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* threads = nullptr;
  CLI::Option* pools = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* benchmark = nullptr;
  CLI::Option* bm25_params = nullptr;
};

void add_flags(CLI::App& app, Flags& f, Options& o) {
  app.add_option("--config", f.config, "JSON config file; flags override its values");
  o.corpus = app.add_option("--corpus", f.corpus, "Corpus JSONL file");
  o.embeddings = app.add_option("--embeddings", f.embeddings,
                                "Dense model as NAME=PATH to a .f32 file (repeatable)");
  o.metric = app.add_option("--metric", f.metric, "Dense similarity: cosine, dot, euclidean");
  o.setup = app.add_option("--setup", f.setup, "Pool setup: dataset or field");
  o.fields = app.add_option("--field", f.fields, "Field name or abbreviation (repeatable)");
  o.sizes = app.add_option("--size", f.sizes, "Pool size (repeatable)");
  o.field_size = app.add_option("--field-size", f.field_size, "Pool size for field-level pools");
  o.queries = app.add_option("--queries", f.queries, "Queries per dataset or per field");
  o.bench_queries =
      app.add_option("--bench-queries", f.bench_queries, "Benchmark queries per field");
  o.query_year = app.add_option("--query-year", f.query_year, "Publication year of queries");
  o.repetitions = app.add_option("--repetitions", f.repetitions, "Pool repetitions");
  o.cutoff = app.add_option("--cutoff", f.cutoff, "Ranking depth");
  o.recall_cutoff = app.add_option("--recall-cutoff", f.recall_cutoff, "Recall@k depth");
  o.k1 = app.add_option("--k1", f.k1, "BM25 k1");
  o.b = app.add_option("--b", f.b, "BM25 b");
  o.tune = app.add_flag("--tune", f.tune, "Grid-search BM25 parameters first");
  o.prefiltered = app.add_flag("--prefiltered", f.prefiltered, "Corpus is already prefiltered");
  o.max_rejects =
      app.add_option("--max-rejects", f.max_rejects, "Tolerated malformed corpus lines");
  o.seed = app.add_option("--seed", f.seed, "Master RNG seed");
  o.out = app.add_option("--out", f.out, "Output directory");
  o.threads = app.add_option("--threads", f.threads, "Worker threads");
  o.pools = app.add_option("--pool", f.pools, "Pool JSON file (repeatable)");
  o.runs = app.add_option("--run", f.runs, "Run TSV file (repeatable)");
  o.benchmark = app.add_option("--benchmark", f.benchmark, "Benchmark JSONL file");
  o.bm25_params = app.add_option("--bm25-params", f.bm25_params, "Tuned BM25 parameter file");
}

RunConfig effective_config(const Flags& f, const Options& o) {
  RunConfig c = f.config.empty() ? RunConfig{} : citebench::cli::load_config(f.config);
  auto set = [](const CLI::Option* opt) { return opt->count() > 0; };
  if (set(o.corpus)) c.corpus = f.corpus;
  if (set(o.embeddings)) {
    c.embeddings.clear();
    for (const auto& spec : f.embeddings) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw Error("invalid_argument", "--embeddings expects NAME=PATH, got " + spec);
      c.embeddings[spec.substr(0, eq)] = spec.substr(eq + 1);
    }
  }
  if (set(o.metric)) c.metric = f.metric;
  if (set(o.setup)) c.setup = f.setup;
  if (set(o.fields)) c.fields = f.fields;
  if (set(o.sizes)) c.sizes = f.sizes;
  if (set(o.field_size)) c.field_size = f.field_size;
  if (set(o.queries)) c.queries = f.queries;
  if (set(o.bench_queries)) c.bench_queries = f.bench_queries;
  if (set(o.query_year)) c.query_year = f.query_year;
  if (set(o.repetitions)) c.repetitions = f.repetitions;
  if (set(o.cutoff)) c.cutoff = f.cutoff;
  if (set(o.recall_cutoff)) c.recall_cutoff = f.recall_cutoff;
  if (set(o.k1)) c.k1 = f.k1;
  if (set(o.b)) c.b = f.b;
  if (set(o.tune)) c.tune = f.tune;
  if (set(o.prefiltered)) c.prefiltered = f.prefiltered;
  if (set(o.max_rejects)) c.max_rejects = f.max_rejects;
  if (set(o.seed)) c.seed = f.seed;
  if (set(o.out)) c.out = f.out;
  if (set(o.threads)) c.threads = f.threads;
  if (set(o.pools)) c.pools = f.pools;
  if (set(o.runs)) c.runs = f.runs;
  if (set(o.benchmark)) c.benchmark = f.benchmark;
  if (set(o.bm25_params)) c.bm25_params = f.bm25_params;
  if (c.threads == 0) throw Error("invalid_argument", "--threads must be at least 1");
  if (c.sizes.empty()) throw Error("invalid_argument", "at least one --size is required");
  if (c.repetitions == 0) throw Error("invalid_argument", "--repetitions must be at least 1");
  citebench::parse_setup(c.setup);
  citebench::parse_metric(c.metric);
  return c;
}

int fail(const std::string& code, const std::string& message) {
  nlohmann::json j{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << j.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation recommendation benchmark toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(citebench::kVersion));

  Flags flags;
  Options options;
  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands{
      {"ingest", "Load and validate a corpus, report counts"},
      {"prefilter", "Apply the eligibility rules and write the filtered corpus"},
      {"pool", "Sample queries and build candidate pools"},
      {"tune", "Grid-search BM25 k1 and b on a pool"},
      {"run", "Rank every pool with every model"},
      {"eval", "Score runs against pool qrels"},
      {"benchgen", "Generate the multi-domain benchmark"},
      {"report", "Per-field MAP and R@5 tables on a benchmark"},
      {"breakdown", "Per-candidate-type MAP and R@5 on a benchmark"},
      {"pipeline", "Run every stage end to end"},
      {"synth", "Write a synthetic corpus and embeddings"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    subs.push_back(sub);
  }
  // Options are attached per subcommand so they may follow its name.
  std::vector<Options> per_sub(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    add_flags(*subs[i], flags, per_sub[i]);
    if (std::string(commands[i].name) == "synth")
      subs[i]->add_option("--articles", flags.articles, "Number of synthetic articles");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("invalid_argument", e.what());
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const RunConfig cfg = effective_config(flags, per_sub[i]);
      const std::string name = commands[i].name;
      std::string summary;
      namespace cmd = citebench::cli;
      if (name == "ingest") summary = cmd::cmd_ingest(cfg);
      else if (name == "prefilter") summary = cmd::cmd_prefilter(cfg);
      else if (name == "pool") summary = cmd::cmd_pool(cfg);
      else if (name == "tune") summary = cmd::cmd_tune(cfg);
      else if (name == "run") summary = cmd::cmd_run(cfg);
      else if (name == "eval") summary = cmd::cmd_eval(cfg);
      else if (name == "benchgen") summary = cmd::cmd_benchgen(cfg);
      else if (name == "report") summary = cmd::cmd_report(cfg);
      else if (name == "breakdown") summary = cmd::cmd_breakdown(cfg);
      else if (name == "pipeline") summary = cmd::cmd_pipeline(cfg);
      else if (name == "synth") summary = cmd::cmd_synth(cfg, flags.articles);
      std::cout << summary << std::endl;
    }
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
