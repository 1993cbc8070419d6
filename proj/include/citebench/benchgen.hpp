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
#include <array>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "citebench/corpus.hpp"
#include "citebench/error.hpp"
#include "citebench/field.hpp"
#include "citebench/metrics.hpp"
#include "citebench/parallel.hpp"
#include "citebench/rng.hpp"
#include "citebench/run.hpp"
#include "citebench/types.hpp"

namespace citebench {

/// Provenance of a benchmark negative. The first three are bound to
/// concrete retrieval runs at generation time.
enum class CandidateType { BM25, SPECTER_LIKE, SCINCL_LIKE, GRAPH, MOST_CITED, RANDOM };

inline constexpr std::array<CandidateType, 6> kCandidateTypes{
    CandidateType::BM25,  CandidateType::SPECTER_LIKE, CandidateType::SCINCL_LIKE,
    CandidateType::GRAPH, CandidateType::MOST_CITED,   CandidateType::RANDOM};

inline constexpr std::array<CandidateType, 3> kModelBasedTypes{
    CandidateType::BM25, CandidateType::SPECTER_LIKE, CandidateType::SCINCL_LIKE};

inline std::string_view type_name(CandidateType t) {
  switch (t) {
    case CandidateType::BM25: return "BM25";
    case CandidateType::SPECTER_LIKE: return "SPECTER_LIKE";
    case CandidateType::SCINCL_LIKE: return "SCINCL_LIKE";
    case CandidateType::GRAPH: return "GRAPH";
    case CandidateType::MOST_CITED: return "MOST_CITED";
    case CandidateType::RANDOM: return "RANDOM";
  }
  return "";
}

inline CandidateType parse_candidate_type(std::string_view s) {
  for (auto t : kCandidateTypes)
    if (type_name(t) == s) return t;
  throw Error("invalid_argument", "unknown candidate type: " + std::string(s));
}

/// Result of one selection strategy. `shortfall` is set when fewer than the
/// requested number of candidates were available.
struct Selection {
  IdSet ids;
  bool shortfall = false;
};

using NegativeLists = std::map<ArticleId, std::vector<ArticleId>>;

/// Per query: the run's ranking with relevant ids (and the query itself)
/// removed first, then truncated to `depth`.
inline NegativeLists top_negatives_per_model(const RetrievalRun& run, const Qrels& qrels,
                                             std::size_t depth) {
  static const IdSet kNone;
  NegativeLists out;
  for (const auto& [query, ranked] : run.results) {
    auto it = qrels.find(query);
    const IdSet& relevant = it == qrels.end() ? kNone : it->second;
    auto& list = out[query];
    for (const auto& s : ranked) {
      if (list.size() >= depth) break;
      if (s.id == query || relevant.contains(s.id)) continue;
      list.push_back(s.id);
    }
  }
  return out;
}

struct DiversityScore {
  std::string model;
  double mean_jaccard = 0.0;
};

/// Mean over queries of the Jaccard index between two models' negative
/// sets. A query missing from one model counts as an empty set there;
/// queries where both sets are empty are skipped.
inline double pairwise_model_overlap(const NegativeLists& a, const NegativeLists& b) {
  IdSet queries;
  for (const auto& [q, l] : a) queries.insert(q);
  for (const auto& [q, l] : b) queries.insert(q);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& q : queries) {
    IdSet sa, sb;
    if (auto it = a.find(q); it != a.end()) sa.insert(it->second.begin(), it->second.end());
    if (auto it = b.find(q); it != b.end()) sb.insert(it->second.begin(), it->second.end());
    if (sa.empty() && sb.empty()) continue;
    sum += jaccard(sa, sb);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

/// Each model's mean pairwise overlap against every other model, sorted
/// ascending by score then name.
inline std::vector<DiversityScore> model_diversity(
    const std::map<std::string, NegativeLists>& per_model) {
  std::vector<std::string> names;
  for (const auto& [name, lists] : per_model) names.push_back(name);
  const std::size_t m = names.size();
  std::vector<std::vector<double>> pair(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      pair[i][j] = pair[j][i] =
          pairwise_model_overlap(per_model.at(names[i]), per_model.at(names[j]));
  std::vector<DiversityScore> out;
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) sum += pair[i][j];
    out.push_back({names[i], m > 1 ? sum / static_cast<double>(m - 1) : 0.0});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    // Scores equal up to rounding count as tied, so the name decides.
    if (std::abs(a.mean_jaccard - b.mean_jaccard) > 1e-12) return a.mean_jaccard < b.mean_jaccard;
    return a.model < b.model;
  });
  return out;
}

/// The `m` models whose negatives overlap least with the others.
inline std::vector<std::string> select_diverse_models(
    const std::map<std::string, NegativeLists>& per_model, std::size_t m) {
  if (per_model.size() < m)
    throw Error("insufficient_models", "need " + std::to_string(m) + " models, got " +
                                           std::to_string(per_model.size()));
  auto scores = model_diversity(per_model);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(scores[i].model);
  return out;
}

namespace detail {

inline Selection sample_selection(std::vector<ArticleId> eligible, std::size_t n,
                                  std::uint64_t seed) {
  Selection s;
  s.shortfall = eligible.size() < n;
  Rng rng(seed);
  for (auto& id : rng.sample(std::move(eligible), n)) s.ids.insert(std::move(id));
  return s;
}

}  // namespace detail

/// Uniform sample of n ids from a model's negative list minus `exclude`.
inline Selection model_based_negatives(const ArticleId& query,
                                       std::span<const ArticleId> model_negatives,
                                       std::size_t n, const IdSet& exclude, std::uint64_t seed) {
  std::vector<ArticleId> eligible;
  IdSet seen;
  for (const auto& id : model_negatives)
    if (id != query && !exclude.contains(id) && seen.insert(id).second) eligible.push_back(id);
  return detail::sample_selection(std::move(eligible), n, seed);
}

/// |OC_q ∩ (OC_c ∪ IC_c)| as a fraction of |OC_q|, kept exact.
struct OverlapRatio {
  std::size_t shared = 0;
  std::size_t total = 0;

  double value() const { return static_cast<double>(shared) / static_cast<double>(total); }
};

inline OverlapRatio overlap_ratio(const CitationGraph& graph, const ArticleId& q,
                                  const ArticleId& c) {
  const IdSet& oc_q = graph.out(q);
  if (oc_q.empty()) throw Error("no_citations", "article has no outgoing citations: " + q);
  const IdSet& oc_c = graph.out(c);
  const IdSet& ic_c = graph.in(c);
  OverlapRatio r{0, oc_q.size()};
  for (const auto& x : oc_q)
    if (oc_c.contains(x) || ic_c.contains(x)) ++r.shared;
  return r;
}

inline double overlap_similarity(const CitationGraph& graph, const ArticleId& q,
                                 const ArticleId& c) {
  return overlap_ratio(graph, q, c).value();
}

/// Cited articles of `query` ordered by overlap similarity, highest first,
/// ties by ascending id.
inline std::vector<ArticleId> graph_walk_order(const CitationGraph& graph,
                                               const ArticleId& query) {
  const IdSet& cited = graph.out(query);
  if (cited.empty()) throw Error("no_citations", "article has no outgoing citations: " + query);
  std::vector<std::pair<std::size_t, ArticleId>> keyed;
  for (const auto& c : cited) keyed.emplace_back(overlap_ratio(graph, query, c).shared, c);
  // Shared denominator |OC_q|, so comparing numerators is exact.
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<ArticleId> order;
  for (auto& [k, c] : keyed) order.push_back(std::move(c));
  return order;
}

/// Walks the query's cited articles in overlap order and collects their
/// citation neighbors (ascending id within each) that the query does not
/// cite, until n are gathered.
inline Selection graph_negatives(const Corpus& corpus, const CitationGraph& graph,
                                 const ArticleId& query, std::size_t n, const IdSet& exclude) {
  const IdSet& oc_q = graph.out(query);
  Selection s;
  for (const auto& c : graph_walk_order(graph, query)) {
    IdSet neighbors = graph.out(c);
    neighbors.insert(graph.in(c).begin(), graph.in(c).end());
    for (const auto& x : neighbors) {
      if (s.ids.size() >= n) return s;
      if (x == query || oc_q.contains(x) || exclude.contains(x) || !corpus.contains(x)) continue;
      s.ids.insert(x);
    }
    if (s.ids.size() >= n) return s;
  }
  s.shortfall = s.ids.size() < n;
  return s;
}

/// Field-labeled corpus articles by incoming-citation count (descending,
/// ties ascending id), truncated to `top`.
inline std::vector<ArticleId> most_cited_list(const Corpus& corpus, const CitationGraph& graph,
                                              Field field, std::size_t top) {
  std::vector<std::pair<std::size_t, ArticleId>> keyed;
  for (const auto& id : corpus.ids())
    if (corpus.at(id).has_field(field)) keyed.emplace_back(graph.in(id).size(), id);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<ArticleId> out;
  for (std::size_t i = 0; i < std::min(top, keyed.size()); ++i) out.push_back(keyed[i].second);
  return out;
}

inline Selection most_cited_negatives(const Corpus& corpus, const CitationGraph& graph,
                                      Field field, const ArticleId& query, std::size_t n,
                                      std::size_t top, const IdSet& exclude, std::uint64_t seed) {
  std::vector<ArticleId> eligible;
  for (auto& id : most_cited_list(corpus, graph, field, top))
    if (id != query && !exclude.contains(id)) eligible.push_back(std::move(id));
  return detail::sample_selection(std::move(eligible), n, seed);
}

inline Selection most_cited_negatives(const Corpus& corpus, const CitationGraph& graph,
                                      std::string_view field_label, const ArticleId& query,
                                      std::size_t n, std::size_t top, const IdSet& exclude,
                                      std::uint64_t seed) {
  auto f = parse_field(field_label);
  if (!f) throw Error("unknown_field", "unknown field label: " + std::string(field_label));
  return most_cited_negatives(corpus, graph, *f, query, n, top, exclude, seed);
}

/// Uniform sample of n corpus articles outside `exclude`.
inline Selection random_negatives(const Corpus& corpus, const ArticleId& query, std::size_t n,
                                  const IdSet& exclude, std::uint64_t seed) {
  std::size_t blocked = corpus.contains(query) ? 1 : 0;
  for (const auto& id : exclude)
    if (id != query && corpus.contains(id)) ++blocked;
  const std::size_t available = corpus.size() - blocked;
  const auto& ids = corpus.ids();
  auto eligible = [&](const ArticleId& id) { return id != query && !exclude.contains(id); };
  if (available <= n || available * 2 < ids.size()) {
    std::vector<ArticleId> pop;
    pop.reserve(available);
    for (const auto& id : ids)
      if (eligible(id)) pop.push_back(id);
    return detail::sample_selection(std::move(pop), n, seed);
  }
  // Mostly-eligible population: rejection sampling avoids materializing it.
  Selection s;
  Rng rng(seed);
  while (s.ids.size() < n) {
    const auto& id = ids[rng.below(ids.size())];
    if (eligible(id)) s.ids.insert(id);
  }
  return s;
}

/// n cited corpus articles, or nullopt when the query cites fewer than n.
inline std::optional<IdSet> sample_positives(const Corpus& corpus, const CitationGraph& graph,
                                             const ArticleId& query, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<ArticleId> cited;
  for (const auto& c : graph.out(query))
    if (corpus.contains(c)) cited.push_back(c);
  if (cited.size() < n) return std::nullopt;
  return detail::sample_selection(std::move(cited), n, seed).ids;
}

struct BenchmarkParams {
  std::size_t positives = 5;
  std::size_t negatives_per_type = 10;
  std::size_t model_depth = 200;
  std::size_t most_cited_top = 200;
  std::size_t threads = 1;
};

inline constexpr std::size_t kDiverseModels = 3;

struct BenchmarkEntry {
  ArticleId query_id;
  Field field = Field::Art;
  IdSet positives;
  std::map<CandidateType, IdSet> negatives;

  /// Positives plus every negative group.
  IdSet candidates() const {
    IdSet out = positives;
    for (const auto& [t, ids] : negatives) out.insert(ids.begin(), ids.end());
    return out;
  }
};

struct BenchmarkManifest {
  std::uint64_t seed = 0;
  BenchmarkParams params;
  std::vector<std::string> model_runs;
  std::vector<DiversityScore> diversity;
  std::map<CandidateType, std::string> bindings;
  std::string corpus_hash;
  std::size_t queries_considered = 0;
  std::size_t dropped = 0;
  std::map<std::string, std::size_t> drop_reasons;
};

struct Benchmark {
  std::vector<BenchmarkEntry> entries;
  BenchmarkManifest manifest;

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) {
      n += e.positives.size();
      for (const auto& [t, ids] : e.negatives) n += ids.size();
    }
    return n;
  }

  std::map<Field, std::vector<const BenchmarkEntry*>> by_field() const {
    std::map<Field, std::vector<const BenchmarkEntry*>> out;
    for (const auto& e : entries) out[e.field].push_back(&e);
    return out;
  }
};

/// Queries x (positives + 6 x negatives_per_type) for full-size entries.
constexpr std::size_t expected_pair_count(std::size_t fields, std::size_t queries_per_field,
                                          std::size_t positives = 5,
                                          std::size_t negatives_per_type = 10) {
  return fields * queries_per_field * (positives + kCandidateTypes.size() * negatives_per_type);
}

namespace detail {

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Assigns the selected runs to the three model-based slots: a run whose
/// name contains a slot's stem ("bm25", "specter", "scincl") takes that
/// slot; the rest fill the remaining slots in selection order.
inline std::map<CandidateType, std::string> bind_model_slots(
    const std::vector<std::string>& selected) {
  static constexpr std::array<std::string_view, 3> kStems{"bm25", "specter", "scincl"};
  std::map<CandidateType, std::string> bound;
  std::vector<bool> used(selected.size(), false);
  for (std::size_t s = 0; s < kModelBasedTypes.size(); ++s)
    for (std::size_t i = 0; i < selected.size(); ++i)
      if (!used[i] && lowercase(selected[i]).find(kStems[s]) != std::string::npos) {
        bound[kModelBasedTypes[s]] = selected[i];
        used[i] = true;
        break;
      }
  std::size_t next = 0;
  for (auto slot : kModelBasedTypes) {
    if (bound.contains(slot)) continue;
    while (used[next]) ++next;
    bound[slot] = selected[next];
    used[next] = true;
  }
  return bound;
}

}  // namespace detail

/// Builds benchmark entries: positives first, then negative groups in
/// kCandidateTypes order, each excluding the query, everything it cites and
/// every earlier pick. Queries with any shortfall are dropped. Randomness is
/// derived per (query, group) from `seed`, so output does not depend on the
/// thread count.
inline Benchmark build_benchmark(const Corpus& corpus, const CitationGraph& graph,
                                 const std::map<Field, std::vector<ArticleId>>& queries_by_field,
                                 const std::map<std::string, RetrievalRun>& model_runs,
                                 const BenchmarkParams& params, std::uint64_t seed) {
  if (model_runs.size() < kDiverseModels)
    throw Error("insufficient_models", "benchmark generation needs at least 3 model runs");
  Benchmark bench;
  auto& manifest = bench.manifest;
  manifest.seed = seed;
  manifest.params = params;

  Qrels cited;
  for (const auto& [field, queries] : queries_by_field)
    for (const auto& q : queries) cited[q] = graph.out(q);
  std::map<std::string, NegativeLists> negatives;
  for (const auto& [name, run] : model_runs) {
    manifest.model_runs.push_back(name);
    negatives[name] = top_negatives_per_model(run, cited, params.model_depth);
  }
  manifest.diversity = model_diversity(negatives);
  std::vector<std::string> selected;
  for (std::size_t i = 0; i < kDiverseModels; ++i)
    selected.push_back(manifest.diversity[i].model);
  manifest.bindings = detail::bind_model_slots(selected);

  std::map<Field, std::vector<ArticleId>> top_cited;
  for (const auto& [field, queries] : queries_by_field)
    top_cited[field] = most_cited_list(corpus, graph, field, params.most_cited_top);

  struct Job {
    Field field;
    const ArticleId* query;
  };
  std::vector<Job> jobs;
  for (const auto& [field, queries] : queries_by_field)
    for (const auto& q : queries) jobs.push_back({field, &q});

  std::vector<std::optional<BenchmarkEntry>> results(jobs.size());
  std::vector<std::string> reasons(jobs.size());
  parallel_for(jobs.size(), params.threads, [&](std::size_t i) {
    const ArticleId& q = *jobs[i].query;
    const Field field = jobs[i].field;
    auto positives = sample_positives(corpus, graph, q, params.positives,
                                      derive_seed(seed, q, "POSITIVES"));
    if (!positives) {
      reasons[i] = "POSITIVES";
      return;
    }
    BenchmarkEntry entry{q, field, *positives, {}};
    IdSet exclude = graph.out(q);
    exclude.insert(q);
    exclude.insert(positives->begin(), positives->end());
    for (auto type : kCandidateTypes) {
      const std::uint64_t s = derive_seed(seed, q, type_name(type));
      Selection pick;
      switch (type) {
        case CandidateType::BM25:
        case CandidateType::SPECTER_LIKE:
        case CandidateType::SCINCL_LIKE: {
          const auto& lists = negatives.at(manifest.bindings.at(type));
          auto it = lists.find(q);
          static const std::vector<ArticleId> kEmpty;
          pick = model_based_negatives(q, it == lists.end() ? kEmpty : it->second,
                                       params.negatives_per_type, exclude, s);
          break;
        }
        case CandidateType::GRAPH:
          pick = graph_negatives(corpus, graph, q, params.negatives_per_type, exclude);
          break;
        case CandidateType::MOST_CITED: {
          std::vector<ArticleId> eligible;
          for (const auto& id : top_cited.at(field))
            if (!exclude.contains(id)) eligible.push_back(id);
          pick = detail::sample_selection(std::move(eligible), params.negatives_per_type, s);
          break;
        }
        case CandidateType::RANDOM:
          pick = random_negatives(corpus, q, params.negatives_per_type, exclude, s);
          break;
      }
      if (pick.shortfall || pick.ids.size() < params.negatives_per_type) {
        reasons[i] = std::string(type_name(type));
        return;
      }
      exclude.insert(pick.ids.begin(), pick.ids.end());
      entry.negatives[type] = std::move(pick.ids);
    }
    results[i] = std::move(entry);
  });

  manifest.queries_considered = jobs.size();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i]) {
      bench.entries.push_back(std::move(*results[i]));
    } else {
      ++manifest.dropped;
      ++manifest.drop_reasons[reasons[i]];
    }
  }
  return bench;
}

inline nlohmann::json entry_to_json(const BenchmarkEntry& e) {
  nlohmann::json neg = nlohmann::json::object();
  for (const auto& [t, ids] : e.negatives) neg[std::string(type_name(t))] = ids;
  return {{"query_id", e.query_id},
          {"field", field_abbreviation(e.field)},
          {"positives", e.positives},
          {"negatives", std::move(neg)}};
}

inline BenchmarkEntry entry_from_json(const nlohmann::json& j) {
  BenchmarkEntry e;
  e.query_id = j.at("query_id").get<ArticleId>();
  auto f = parse_field(j.at("field").get<std::string>());
  if (!f) throw Error("unknown_field", "unknown field in benchmark entry " + e.query_id);
  e.field = *f;
  e.positives = j.at("positives").get<IdSet>();
  for (const auto& [key, ids] : j.at("negatives").items())
    e.negatives[parse_candidate_type(key)] = ids.get<IdSet>();
  return e;
}

inline nlohmann::json manifest_to_json(const BenchmarkManifest& m) {
  nlohmann::json diversity = nlohmann::json::array();
  for (const auto& d : m.diversity)
    diversity.push_back({{"model", d.model}, {"mean_jaccard", d.mean_jaccard}});
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [t, name] : m.bindings) bindings[std::string(type_name(t))] = name;
  return {{"seed", m.seed},
          {"params",
           {{"positives", m.params.positives},
            {"negatives_per_type", m.params.negatives_per_type},
            {"model_depth", m.params.model_depth},
            {"most_cited_top", m.params.most_cited_top}}},
          {"model_runs", m.model_runs},
          {"diversity", std::move(diversity)},
          {"bindings", std::move(bindings)},
          {"corpus_hash", m.corpus_hash},
          {"queries_considered", m.queries_considered},
          {"dropped", m.dropped},
          {"drop_reasons", m.drop_reasons}};
}

inline void write_benchmark(std::ostream& out, const Benchmark& bench) {
  for (const auto& e : bench.entries) out << entry_to_json(e).dump() << '\n';
}

inline Benchmark read_benchmark(std::istream& in) {
  Benchmark bench;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      bench.entries.push_back(entry_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed_benchmark",
                  "benchmark line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return bench;
}

inline Benchmark load_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read benchmark file " + path);
  return read_benchmark(in);
}

}  // namespace citebench
