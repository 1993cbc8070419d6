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
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citebench/analyzer.hpp"
#include "citebench/corpus.hpp"
#include "citebench/error.hpp"
#include "citebench/metrics.hpp"
#include "citebench/types.hpp"

namespace citebench {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;

  void validate() const {
    if (!(k1 >= 0.0)) throw Error("invalid_argument", "bm25: k1 must be >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw Error("invalid_argument", "bm25: b must be in [0, 1]");
  }

  bool operator==(const Bm25Params&) const = default;
};

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;

  bool operator==(const Posting&) const = default;
};

/// Okapi BM25 over an in-memory inverted index. Immutable after build;
/// all query methods are safe to call concurrently.
class Bm25Index {
 public:
  using Document = std::pair<ArticleId, std::string>;

  static Bm25Index build(std::span<const Document> docs, AnalyzerConfig config = {}) {
    if (docs.empty()) throw Error("empty_corpus", "cannot index an empty corpus");
    Bm25Index ix;
    ix.config_ = std::move(config);
    std::unordered_map<std::string, std::vector<Posting>> postings;
    std::uint64_t total = 0;
    for (const auto& [id, text] : docs) {
      if (ix.doc_index_.contains(id)) throw Error("duplicate_id", "duplicate document id: " + id);
      const auto doc = static_cast<std::uint32_t>(ix.doc_ids_.size());
      ix.doc_index_.emplace(id, doc);
      ix.doc_ids_.push_back(id);
      const auto tokens = analyze(text, ix.config_);
      ix.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
      total += tokens.size();
      for (const auto& t : tokens) {
        auto& list = postings[t];
        if (!list.empty() && list.back().doc == doc) {
          ++list.back().tf;
        } else {
          list.push_back({doc, 1});
        }
      }
    }
    ix.total_length_ = total;
    ix.avgdl_ = static_cast<double>(total) / static_cast<double>(ix.doc_ids_.size());
    std::vector<std::string> terms;
    terms.reserve(postings.size());
    for (const auto& [t, list] : postings) terms.push_back(t);
    std::sort(terms.begin(), terms.end());
    for (auto& t : terms) {
      ix.term_index_.emplace(t, static_cast<std::uint32_t>(ix.terms_.size()));
      ix.postings_.push_back(std::move(postings[t]));
      ix.terms_.push_back(std::move(t));
    }
    return ix;
  }

  std::size_t doc_count() const { return doc_ids_.size(); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  double avgdl() const { return avgdl_; }
  const AnalyzerConfig& analyzer() const { return config_; }
  const std::vector<ArticleId>& doc_ids() const { return doc_ids_; }
  bool contains(const ArticleId& id) const { return doc_index_.contains(id); }

  std::uint32_t doc_length(const ArticleId& id) const { return doc_lengths_[doc_index(id)]; }

  /// Postings for `term` sorted by internal document number, or empty.
  std::span<const Posting> postings(std::string_view term) const {
    auto it = term_index_.find(std::string(term));
    if (it == term_index_.end()) return {};
    return postings_[it->second];
  }

  std::size_t document_frequency(std::string_view term) const { return postings(term).size(); }

  std::uint32_t term_frequency(std::string_view term, const ArticleId& id) const {
    return frequency(postings(term), doc_index(id));
  }

  /// ln((N - n + 0.5) / (n + 0.5) + 1); unseen terms use n = 0.
  double idf(std::string_view term) const { return idf_for(document_frequency(term)); }

  /// Sum over query-term occurrences; absent terms contribute 0.
  double score(std::span<const std::string> query_terms, const ArticleId& doc,
               const Bm25Params& params) const {
    params.validate();
    const std::uint32_t d = doc_index(doc);
    double s = 0.0;
    for (const auto& t : query_terms) {
      const auto list = postings(t);
      const std::uint32_t f = frequency(list, d);
      if (f == 0) continue;
      s += contribution(idf_for(list.size()), f, doc_lengths_[d], params);
    }
    return s;
  }

  /// Top-k documents that match at least one query term, optionally
  /// restricted to `pool` and never including `exclude`. Scores are
  /// bit-identical to score().
  std::vector<ScoredId> search(std::string_view query_text, const Bm25Params& params,
                               std::size_t k, const IdSet* pool = nullptr,
                               const ArticleId* exclude = nullptr) const {
    return search_terms(analyze(query_text, config_), params, k, pool, exclude);
  }

  std::vector<ScoredId> search_terms(std::span<const std::string> query_terms,
                                     const Bm25Params& params, std::size_t k,
                                     const IdSet* pool = nullptr,
                                     const ArticleId* exclude = nullptr) const {
    if (k == 0) throw Error("invalid_argument", "search: k must be positive");
    params.validate();
    std::vector<char> allowed;
    if (pool != nullptr) {
      allowed.assign(doc_ids_.size(), 0);
      for (const auto& id : *pool)
        if (auto it = doc_index_.find(id); it != doc_index_.end()) allowed[it->second] = 1;
    }
    std::optional<std::uint32_t> excluded;
    if (exclude != nullptr)
      if (auto it = doc_index_.find(*exclude); it != doc_index_.end()) excluded = it->second;

    std::vector<double> acc(doc_ids_.size(), 0.0);
    std::vector<char> touched(doc_ids_.size(), 0);
    std::vector<std::uint32_t> hits;
    for (const auto& t : query_terms) {
      const auto list = postings(t);
      if (list.empty()) continue;
      const double w = idf_for(list.size());
      for (const auto& p : list) {
        if (pool != nullptr && !allowed[p.doc]) continue;
        if (excluded && *excluded == p.doc) continue;
        acc[p.doc] += contribution(w, p.tf, doc_lengths_[p.doc], params);
        if (!touched[p.doc]) {
          touched[p.doc] = 1;
          hits.push_back(p.doc);
        }
      }
    }
    auto before = [&](std::uint32_t a, std::uint32_t b) {
      if (acc[a] != acc[b]) return acc[a] > acc[b];
      return doc_ids_[a] < doc_ids_[b];
    };
    const std::size_t n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                      before);
    std::vector<ScoredId> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({doc_ids_[hits[i]], acc[hits[i]]});
    return out;
  }

  // Binary layout, little-endian:
  //   "CBM25IX\0" u32 version
  //   u8 lowercase, u32 n_stopwords, n_stopwords x str
  //   u32 n_docs, n_docs x (str id, u32 length)
  //   u32 n_terms, n_terms x (str term, u32 n_postings, n_postings x (u32 doc, u32 tf))
  // where str = u32 byte length + bytes. Stopwords and terms are sorted.
  static constexpr std::uint32_t kFormatVersion = 1;

  void save(std::ostream& out) const {
    out.write(kMagic, sizeof kMagic);
    put_u32(out, kFormatVersion);
    out.put(config_.lowercase ? 1 : 0);
    std::vector<std::string> stop;
    if (config_.stopwords) stop.assign(config_.stopwords->begin(), config_.stopwords->end());
    std::sort(stop.begin(), stop.end());
    put_u32(out, config_.stopwords ? static_cast<std::uint32_t>(stop.size()) + 1 : 0);
    for (const auto& s : stop) put_str(out, s);
    put_u32(out, static_cast<std::uint32_t>(doc_ids_.size()));
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
      put_str(out, doc_ids_[i]);
      put_u32(out, doc_lengths_[i]);
    }
    put_u32(out, static_cast<std::uint32_t>(terms_.size()));
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      put_str(out, terms_[t]);
      put_u32(out, static_cast<std::uint32_t>(postings_[t].size()));
      for (const auto& p : postings_[t]) {
        put_u32(out, p.doc);
        put_u32(out, p.tf);
      }
    }
    if (!out) throw Error("io", "failed writing bm25 index");
  }

  static Bm25Index load(std::istream& in) {
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
      throw Error("bad_index", "not a bm25 index file");
    if (get_u32(in) != kFormatVersion) throw Error("bad_index", "unsupported bm25 index version");
    Bm25Index ix;
    ix.config_.lowercase = in.get() == 1;
    if (const std::uint32_t n_stop = get_u32(in); n_stop > 0) {
      ix.config_.stopwords.emplace();
      for (std::uint32_t i = 0; i + 1 < n_stop; ++i) ix.config_.stopwords->insert(get_str(in));
    }
    const std::uint32_t n_docs = get_u32(in);
    for (std::uint32_t i = 0; i < n_docs; ++i) {
      auto id = get_str(in);
      ix.doc_index_.emplace(id, i);
      ix.doc_ids_.push_back(std::move(id));
      ix.doc_lengths_.push_back(get_u32(in));
      ix.total_length_ += ix.doc_lengths_.back();
    }
    if (n_docs == 0) throw Error("bad_index", "bm25 index has no documents");
    ix.avgdl_ = static_cast<double>(ix.total_length_) / static_cast<double>(n_docs);
    const std::uint32_t n_terms = get_u32(in);
    for (std::uint32_t t = 0; t < n_terms; ++t) {
      auto term = get_str(in);
      std::vector<Posting> list(get_u32(in));
      for (auto& p : list) {
        p.doc = get_u32(in);
        p.tf = get_u32(in);
        if (p.doc >= n_docs) throw Error("bad_index", "posting references unknown document");
      }
      ix.term_index_.emplace(term, t);
      ix.terms_.push_back(std::move(term));
      ix.postings_.push_back(std::move(list));
    }
    if (!in) throw Error("bad_index", "truncated bm25 index file");
    return ix;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path);
    save(out);
  }

  static Bm25Index load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read " + path);
    return load(in);
  }

 private:
  static constexpr char kMagic[8] = {'C', 'B', 'M', '2', '5', 'I', 'X', '\0'};

  std::uint32_t doc_index(const ArticleId& id) const {
    auto it = doc_index_.find(id);
    if (it == doc_index_.end()) throw Error("unknown_doc", "document not in index: " + id);
    return it->second;
  }

  static std::uint32_t frequency(std::span<const Posting> list, std::uint32_t doc) {
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return it != list.end() && it->doc == doc ? it->tf : 0;
  }

  double idf_for(std::size_t n) const {
    const double big_n = static_cast<double>(doc_ids_.size());
    const double df = static_cast<double>(n);
    return std::log((big_n - df + 0.5) / (df + 0.5) + 1.0);
  }

  double contribution(double idf, std::uint32_t tf, std::uint32_t length,
                      const Bm25Params& p) const {
    const double f = static_cast<double>(tf);
    const double norm = p.k1 * (1.0 - p.b + p.b * static_cast<double>(length) / avgdl_);
    return idf * (f * (p.k1 + 1.0)) / (f + norm);
  }

  static void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>(v >> 24)};
    out.write(bytes, 4);
  }

  static std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4] = {};
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw Error("bad_index", "truncated bm25 index file");
    return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
           (std::uint32_t{b[3]} << 24);
  }

  static void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  static std::string get_str(std::istream& in) {
    std::string s(get_u32(in), '\0');
    in.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in) throw Error("bad_index", "truncated bm25 index file");
    return s;
  }

  AnalyzerConfig config_;
  std::vector<ArticleId> doc_ids_;
  std::unordered_map<ArticleId, std::uint32_t> doc_index_;
  std::vector<std::uint32_t> doc_lengths_;
  std::uint64_t total_length_ = 0;
  double avgdl_ = 0.0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> term_index_;
  std::vector<std::vector<Posting>> postings_;
};

/// Indexes title + " " + abstract of every article.
inline Bm25Index build_index(const Corpus& corpus, AnalyzerConfig config = {}) {
  std::vector<Bm25Index::Document> docs;
  docs.reserve(corpus.size());
  for (const auto& a : corpus.articles()) docs.emplace_back(a.id, a.text());
  return Bm25Index::build(docs, std::move(config));
}

enum class TuneObjective { MAP, NDCG, Recall };

struct ValidationQuery {
  std::string text;
  IdSet positives;
  std::optional<ArticleId> query_id;  // excluded from its own results
};

struct TuneOptions {
  TuneObjective objective = TuneObjective::MAP;
  std::size_t cutoff = 500;         // retrieval depth per query
  std::size_t recall_cutoff = 30;   // used by TuneObjective::Recall
};

struct TuneResult {
  Bm25Params best;
  double best_value = 0.0;
  std::vector<std::pair<Bm25Params, double>> evaluated;  // in grid order
};

/// b in {0.0, 0.1, ..., 1.0} x k1 in {0.1, 0.3, ..., 2.9}.
inline std::vector<Bm25Params> default_tuning_grid() {
  std::vector<Bm25Params> grid;
  for (int bi = 0; bi <= 10; ++bi)
    for (int ki = 0; ki < 15; ++ki)
      grid.push_back({static_cast<double>(2 * ki + 1) / 10.0, static_cast<double>(bi) / 10.0});
  return grid;
}

/// Grid search maximizing the mean objective over validation queries.
/// Ties go to the lexicographically smaller (b, k1).
inline TuneResult tune_params(const Bm25Index& index, std::span<const ValidationQuery> validation,
                              const IdSet* pool, std::span<const Bm25Params> grid,
                              const TuneOptions& options = {}) {
  if (grid.empty()) throw Error("invalid_argument", "tune_params: empty grid");
  if (validation.empty()) throw Error("invalid_argument", "tune_params: empty validation set");
  std::vector<std::vector<std::string>> terms;
  terms.reserve(validation.size());
  for (const auto& v : validation) terms.push_back(analyze(v.text, index.analyzer()));

  TuneResult result;
  bool have_best = false;
  for (const auto& params : grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < validation.size(); ++i) {
      const auto& v = validation[i];
      const ArticleId* exclude = v.query_id ? &*v.query_id : nullptr;
      const auto ranked =
          ids_of(index.search_terms(terms[i], params, options.cutoff, pool, exclude));
      switch (options.objective) {
        case TuneObjective::MAP: sum += average_precision(ranked, v.positives); break;
        case TuneObjective::NDCG: sum += ndcg(ranked, v.positives); break;
        case TuneObjective::Recall:
          sum += recall_at_k(ranked, v.positives, options.recall_cutoff);
          break;
      }
    }
    const double value = sum / static_cast<double>(validation.size());
    result.evaluated.emplace_back(params, value);
    const bool smaller_key =
        std::pair(params.b, params.k1) < std::pair(result.best.b, result.best.k1);
    if (!have_best || value > result.best_value || (value == result.best_value && smaller_key)) {
      result.best = params;
      result.best_value = value;
      have_best = true;
    }
  }
  return result;
}

}  // namespace citebench
