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
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citebench/benchgen.hpp"
#include "citebench/corpus.hpp"
#include "citebench/error.hpp"
#include "citebench/hash.hpp"

namespace citebench::cli {

/// Everything a subcommand needs. Loaded from a JSON file, then overridden
/// by command-line flags.
struct RunConfig {
  std::string corpus;
  std::map<std::string, std::string> embeddings;  // model name -> vector file
  std::string metric = "cosine";
  PrefilterRules prefilter;
  bool prefiltered = false;  // skip prefiltering (input already filtered)
  std::size_t max_rejects = 0;

  std::string setup = "dataset";
  std::vector<std::string> fields;  // empty = all fields
  std::vector<std::size_t> sizes{2000, 5000, 10000, 20000};
  std::size_t field_size = 1000;
  std::size_t queries = 200;
  std::size_t bench_queries = 5;
  int query_year = 2019;
  std::size_t repetitions = 3;
  std::size_t cutoff = 500;
  std::size_t recall_cutoff = 30;

  double k1 = 0.9;
  double b = 0.4;
  bool tune = false;

  BenchmarkParams bench;

  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 1;

  // Inputs produced by earlier stages.
  std::vector<std::string> pools;
  std::vector<std::string> runs;
  std::string benchmark;
  std::string bm25_params;
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["corpus"] = c.corpus;
  j["embeddings"] = c.embeddings;
  j["metric"] = c.metric;
  j["prefilter"] = {{"min_abstract_chars", c.prefilter.min_abstract_chars},
                    {"min_citations", c.prefilter.min_citations},
                    {"require_year", c.prefilter.require_year},
                    {"require_title", c.prefilter.require_title}};
  j["prefiltered"] = c.prefiltered;
  j["max_rejects"] = c.max_rejects;
  j["setup"] = c.setup;
  j["fields"] = c.fields;
  j["size"] = c.sizes;
  j["field_size"] = c.field_size;
  j["queries"] = c.queries;
  j["bench_queries"] = c.bench_queries;
  j["query_year"] = c.query_year;
  j["repetitions"] = c.repetitions;
  j["cutoff"] = c.cutoff;
  j["recall_cutoff"] = c.recall_cutoff;
  j["k1"] = c.k1;
  j["b"] = c.b;
  j["tune"] = c.tune;
  j["benchmark_params"] = {{"positives", c.bench.positives},
                           {"negatives_per_type", c.bench.negatives_per_type},
                           {"model_depth", c.bench.model_depth},
                           {"most_cited_top", c.bench.most_cited_top}};
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  j["out"] = c.out;
  j["threads"] = c.threads;
  j["pool"] = c.pools;
  j["run"] = c.runs;
  j["benchmark"] = c.benchmark;
  j["bm25_params"] = c.bm25_params;
  return j;
}

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& into) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) into = it->get<T>();
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

}  // namespace detail

/// Reads a config file. Relative paths inside it resolve against the
/// file's own directory.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("invalid_config", "cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("invalid_config", path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  RunConfig c;
  try {
    using detail::read_if;
    read_if(j, "corpus", c.corpus);
    read_if(j, "embeddings", c.embeddings);
    read_if(j, "metric", c.metric);
    if (auto it = j.find("prefilter"); it != j.end()) {
      read_if(*it, "min_abstract_chars", c.prefilter.min_abstract_chars);
      read_if(*it, "min_citations", c.prefilter.min_citations);
      read_if(*it, "require_year", c.prefilter.require_year);
      read_if(*it, "require_title", c.prefilter.require_title);
    }
    read_if(j, "prefiltered", c.prefiltered);
    read_if(j, "max_rejects", c.max_rejects);
    read_if(j, "setup", c.setup);
    read_if(j, "fields", c.fields);
    if (auto it = j.find("size"); it != j.end()) {
      if (it->is_array()) {
        c.sizes = it->get<std::vector<std::size_t>>();
      } else {
        c.sizes = {it->get<std::size_t>()};
      }
    }
    read_if(j, "field_size", c.field_size);
    read_if(j, "queries", c.queries);
    read_if(j, "bench_queries", c.bench_queries);
    read_if(j, "query_year", c.query_year);
    read_if(j, "repetitions", c.repetitions);
    read_if(j, "cutoff", c.cutoff);
    read_if(j, "recall_cutoff", c.recall_cutoff);
    read_if(j, "k1", c.k1);
    read_if(j, "b", c.b);
    read_if(j, "tune", c.tune);
    if (auto it = j.find("benchmark_params"); it != j.end()) {
      read_if(*it, "positives", c.bench.positives);
      read_if(*it, "negatives_per_type", c.bench.negatives_per_type);
      read_if(*it, "model_depth", c.bench.model_depth);
      read_if(*it, "most_cited_top", c.bench.most_cited_top);
    }
    if (auto it = j.find("seed"); it != j.end() && !it->is_null())
      c.seed = it->get<std::uint64_t>();
    read_if(j, "out", c.out);
    read_if(j, "threads", c.threads);
    read_if(j, "pool", c.pools);
    read_if(j, "run", c.runs);
    read_if(j, "benchmark", c.benchmark);
    read_if(j, "bm25_params", c.bm25_params);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid_config", path + ": " + e.what());
  }
  c.corpus = detail::resolve(base, c.corpus);
  for (auto& [name, p] : c.embeddings) p = detail::resolve(base, p);
  for (auto& p : c.pools) p = detail::resolve(base, p);
  for (auto& p : c.runs) p = detail::resolve(base, p);
  c.benchmark = detail::resolve(base, c.benchmark);
  c.bm25_params = detail::resolve(base, c.bm25_params);
  c.out = detail::resolve(base, c.out);
  return c;
}

/// Hash of the effective configuration, excluding the output location and
/// the thread count (neither may change results).
inline std::string config_hash(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("out");
  j.erase("threads");
  return hex64(fnv1a(j.dump()));
}

/// Manifest path for an embedding vector file: same stem, ".json" extension.
inline std::string embedding_manifest_path(const std::string& vector_path) {
  return std::filesystem::path(vector_path).replace_extension(".json").string();
}

}  // namespace citebench::cli
