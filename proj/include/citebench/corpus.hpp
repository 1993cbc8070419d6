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
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "citebench/error.hpp"
#include "citebench/field.hpp"
#include "citebench/types.hpp"
#include "citebench/utf8.hpp"

namespace citebench {

struct Article {
  ArticleId id;
  std::string title;
  std::string abstract;
  std::optional<int> year;
  std::vector<Field> fields;
  // Labels outside the 19-field enumeration; kept for round-tripping only.
  std::vector<std::string> raw_fields;
  IdSet out_citations;

  bool has_field(Field f) const {
    return std::find(fields.begin(), fields.end(), f) != fields.end();
  }

  /// Text used for both lexical documents and lexical queries.
  std::string text() const { return title + " " + abstract; }
};

/// An immutable, id-indexed collection of articles.
class Corpus {
 public:
  Corpus() = default;

  explicit Corpus(std::vector<Article> articles, std::size_t rejected_lines = 0)
      : articles_(std::move(articles)), rejected_(rejected_lines) {
    index_.reserve(articles_.size());
    sorted_ids_.reserve(articles_.size());
    for (std::size_t i = 0; i < articles_.size(); ++i) {
      auto& a = articles_[i];
      if (a.id.empty()) throw Error("invalid_article", "article with empty id");
      a.out_citations.erase(a.id);
      if (!index_.emplace(a.id, i).second)
        throw Error("duplicate_id", "duplicate article id: " + a.id);
      sorted_ids_.push_back(a.id);
    }
    std::sort(sorted_ids_.begin(), sorted_ids_.end());
  }

  std::size_t size() const { return articles_.size(); }
  bool empty() const { return articles_.empty(); }
  std::size_t rejected_lines() const { return rejected_; }

  const std::vector<Article>& articles() const { return articles_; }
  /// All ids in ascending order.
  const std::vector<ArticleId>& ids() const { return sorted_ids_; }

  bool contains(const ArticleId& id) const { return index_.contains(id); }

  const Article* find(const ArticleId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &articles_[it->second];
  }

  const Article& at(const ArticleId& id) const {
    const Article* a = find(id);
    if (a == nullptr) throw Error("unknown_article", "unknown article id: " + id);
    return *a;
  }

 private:
  std::vector<Article> articles_;
  std::unordered_map<ArticleId, std::size_t> index_;
  std::vector<ArticleId> sorted_ids_;
  std::size_t rejected_ = 0;
};

namespace detail {

inline Article article_from_json(const nlohmann::json& j) {
  Article a;
  a.id = j.at("id").get<std::string>();
  if (a.id.empty()) throw std::invalid_argument("empty id");
  if (auto it = j.find("title"); it != j.end() && !it->is_null()) a.title = it->get<std::string>();
  if (auto it = j.find("abstract"); it != j.end() && !it->is_null())
    a.abstract = it->get<std::string>();
  if (auto it = j.find("year"); it != j.end() && !it->is_null()) a.year = it->get<int>();
  if (auto it = j.find("fields"); it != j.end() && !it->is_null()) {
    for (const auto& f : *it) {
      auto label = f.get<std::string>();
      if (auto known = parse_field(label)) {
        if (!a.has_field(*known)) a.fields.push_back(*known);
      } else {
        a.raw_fields.push_back(std::move(label));
      }
    }
  }
  if (auto it = j.find("out_citations"); it != j.end() && !it->is_null())
    for (const auto& c : *it) a.out_citations.insert(c.get<std::string>());
  return a;
}

}  // namespace detail

inline nlohmann::json article_to_json(const Article& a) {
  nlohmann::json fields = nlohmann::json::array();
  for (Field f : a.fields) fields.push_back(std::string(field_name(f)));
  for (const auto& raw : a.raw_fields) fields.push_back(raw);
  nlohmann::json j;
  j["id"] = a.id;
  j["title"] = a.title;
  j["abstract"] = a.abstract;
  j["year"] = a.year ? nlohmann::json(*a.year) : nlohmann::json(nullptr);
  j["fields"] = std::move(fields);
  j["out_citations"] = a.out_citations;
  return j;
}

struct LoadOptions {
  // Malformed lines tolerated before loading fails.
  std::size_t max_rejects = 0;
};

/// Parses JSON Lines; blank lines are skipped. Duplicate ids always fail.
inline Corpus parse_corpus(std::istream& in, const LoadOptions& options = {}) {
  std::vector<Article> articles;
  std::size_t rejected = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      articles.push_back(detail::article_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      if (++rejected > options.max_rejects)
        throw Error("malformed_line", "line " + std::to_string(line_no) +
                                          ": malformed article record (" + e.what() + ")");
    }
  }
  return Corpus(std::move(articles), rejected);
}

inline Corpus load_corpus(const std::string& path, const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read corpus file " + path);
  return parse_corpus(in, options);
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& a : corpus.articles()) out << article_to_json(a).dump() << '\n';
}

/// Bidirectional citation adjacency restricted to corpus members.
class CitationGraph {
 public:
  const IdSet& out(const ArticleId& id) const { return lookup(out_, id); }
  const IdSet& in(const ArticleId& id) const { return lookup(in_, id); }

  std::size_t dangling_edges() const { return dangling_; }
  std::size_t edge_count() const { return edges_; }

  const std::unordered_map<ArticleId, IdSet>& out_adjacency() const { return out_; }
  const std::unordered_map<ArticleId, IdSet>& in_adjacency() const { return in_; }

 private:
  friend CitationGraph build_citation_graph(const Corpus& corpus);

  static const IdSet& lookup(const std::unordered_map<ArticleId, IdSet>& m,
                             const ArticleId& id) {
    static const IdSet kEmpty;
    auto it = m.find(id);
    return it == m.end() ? kEmpty : it->second;
  }

  std::unordered_map<ArticleId, IdSet> out_;
  std::unordered_map<ArticleId, IdSet> in_;
  std::size_t dangling_ = 0;
  std::size_t edges_ = 0;
};

inline CitationGraph build_citation_graph(const Corpus& corpus) {
  CitationGraph g;
  g.out_.reserve(corpus.size());
  g.in_.reserve(corpus.size());
  for (const auto& a : corpus.articles()) {
    g.out_[a.id];
    g.in_[a.id];
  }
  for (const auto& a : corpus.articles()) {
    auto& out = g.out_[a.id];
    for (const auto& target : a.out_citations) {
      if (!corpus.contains(target)) {
        ++g.dangling_;
        continue;
      }
      out.insert(target);
      g.in_[target].insert(a.id);
      ++g.edges_;
    }
  }
  return g;
}

struct PrefilterRules {
  std::size_t min_abstract_chars = 30;
  // Compared against incoming citations.
  std::size_t min_citations = 3;
  bool require_year = true;
  bool require_title = true;
};

/// Removal counts; each removed article is attributed to the first rule it fails.
struct PrefilterStats {
  std::size_t input = 0;
  std::size_t missing_year = 0;
  std::size_t empty_title = 0;
  std::size_t short_abstract = 0;
  std::size_t few_citations = 0;
  std::size_t kept = 0;
};

struct PrefilterResult {
  Corpus corpus;
  PrefilterStats stats;
};

namespace detail {
inline bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}
}  // namespace detail

/// Single pass: citation counts come from `graph` as given and are not
/// recomputed after removals.
inline PrefilterResult prefilter(const Corpus& corpus, const CitationGraph& graph,
                                 const PrefilterRules& rules) {
  PrefilterStats stats;
  stats.input = corpus.size();
  std::vector<Article> kept;
  for (const auto& a : corpus.articles()) {
    if (rules.require_year && (!a.year || *a.year == 0)) {
      ++stats.missing_year;
    } else if (rules.require_title && detail::blank(a.title)) {
      ++stats.empty_title;
    } else if (utf8::length(a.abstract) < rules.min_abstract_chars) {
      ++stats.short_abstract;
    } else if (graph.in(a.id).size() < rules.min_citations) {
      ++stats.few_citations;
    } else {
      kept.push_back(a);
    }
  }
  stats.kept = kept.size();
  return {Corpus(std::move(kept)), stats};
}

/// Union of the out-citations of every `field`-labeled article in `corpus`,
/// restricted to `corpus` members.
inline IdSet field_cited_set(const Corpus& corpus, const CitationGraph& graph, Field field) {
  IdSet out;
  for (const auto& a : corpus.articles()) {
    if (!a.has_field(field)) continue;
    for (const auto& c : graph.out(a.id))
      if (corpus.contains(c)) out.insert(c);
  }
  return out;
}

inline IdSet field_cited_set(const Corpus& corpus, const CitationGraph& graph,
                             std::string_view field_label) {
  auto f = parse_field(field_label);
  if (!f) throw Error("unknown_field", "unknown field label: " + std::string(field_label));
  return field_cited_set(corpus, graph, *f);
}

}  // namespace citebench
