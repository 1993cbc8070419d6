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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citebench/corpus.hpp"
#include "citebench/dense.hpp"
#include "citebench/field.hpp"
#include "citebench/rng.hpp"

namespace citebench {

/// A simulated article encoder: the article's latent topic vector plus
/// model-specific Gaussian noise of the given scale.
struct SyntheticEncoder {
  std::string name;
  double noise = 0.5;
};

/// Generator settings for a topical citation corpus. Articles belong to a
/// field and a subtopic within it; text, citations and embeddings all
/// follow that structure, so hard negatives exist for every backend.
struct SyntheticConfig {
  std::size_t articles = 1000;
  std::size_t fields = kFieldCount;
  std::size_t subtopics_per_field = 4;
  int first_year = 2000;
  int query_year = 2019;
  int last_year = 2021;
  double query_year_share = 0.2;
  double after_query_year_share = 0.15;
  double second_field_prob = 0.2;
  std::size_t min_citations = 6;
  std::size_t max_citations = 18;
  double same_subtopic_citation = 0.6;
  double same_field_citation = 0.25;
  double dangling_citation = 0.1;  // chance an article cites one id outside the corpus
  double invalid_share = 0.02;  // per prefilter rule (missing year, empty title, short abstract)
  std::size_t vocab_per_subtopic = 40;
  std::size_t vocab_per_field = 80;
  std::size_t general_vocab = 400;
  std::size_t title_words = 8;
  std::size_t abstract_words = 60;
  std::size_t dim = 32;
  double article_noise = 0.6;
  std::vector<SyntheticEncoder> encoders{{"specter", 0.55}, {"scincl", 0.5}, {"scibert", 1.2}};
  std::uint64_t seed = 1;
};

struct SyntheticData {
  Corpus corpus;
  std::map<std::string, EmbeddingStore> embeddings;
};

namespace detail {

inline std::string synth_word(char kind, std::size_t a, std::size_t b, std::size_t c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%02zux%zuw%zu", kind, a, b, c);
  return buf;
}

inline std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double ss = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    ss += x * x;
  }
  for (auto& x : v) x /= std::sqrt(ss);
  return v;
}

}  // namespace detail

inline SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  Rng rng(cfg.seed);
  const std::size_t n = cfg.articles;
  const std::size_t n_fields = std::min(cfg.fields, kFieldCount);
  const std::size_t n_topics = n_fields * cfg.subtopics_per_field;

  struct Proto {
    int year;
    std::size_t field;
    std::size_t topic;  // global subtopic index
    std::optional<std::size_t> second_field;
  };
  std::vector<Proto> protos(n);
  const std::size_t n_query_year = static_cast<std::size_t>(cfg.query_year_share * n);
  const std::size_t n_after = static_cast<std::size_t>(cfg.after_query_year_share * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = protos[i];
    if (i < n - n_query_year - n_after) {
      p.year = cfg.first_year + static_cast<int>(rng.below(cfg.query_year - cfg.first_year));
    } else if (i < n - n_after) {
      p.year = cfg.query_year;
    } else {
      p.year = cfg.query_year + 1 + static_cast<int>(rng.below(cfg.last_year - cfg.query_year));
    }
    p.field = i % n_fields;
    p.topic = p.field * cfg.subtopics_per_field + rng.below(cfg.subtopics_per_field);
    if (rng.uniform() < cfg.second_field_prob) {
      const std::size_t other = rng.below(n_fields);
      if (other != p.field) p.second_field = other;
    }
  }
  std::stable_sort(protos.begin(), protos.end(),
                   [](const Proto& a, const Proto& b) { return a.year < b.year; });

  std::vector<std::size_t> id_numbers(n);
  for (std::size_t i = 0; i < n; ++i) id_numbers[i] = i + 1;
  rng.shuffle(id_numbers);
  std::vector<ArticleId> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "W%06zu", id_numbers[i]);
    ids[i] = buf;
  }

  auto words = [&](const Proto& p, std::size_t count, double topic_share, double field_share) {
    std::string text;
    for (std::size_t w = 0; w < count; ++w) {
      const double u = rng.uniform();
      std::string word;
      if (u < topic_share) {
        word = detail::synth_word('t', p.field, p.topic, rng.below(cfg.vocab_per_subtopic));
      } else if (u < topic_share + field_share) {
        const std::size_t f = p.second_field && rng.uniform() < 0.3 ? *p.second_field : p.field;
        word = detail::synth_word('f', f, 0, rng.below(cfg.vocab_per_field));
      } else {
        word = detail::synth_word('g', 0, 0, rng.below(cfg.general_vocab));
      }
      if (!text.empty()) text += ' ';
      text += word;
    }
    return text;
  };

  // Citation targets: members by topic / field, plus a popularity list per
  // topic so frequently cited articles keep attracting citations.
  std::vector<std::vector<std::size_t>> topic_members(n_topics), field_members(n_fields),
      topic_popular(n_topics), topic_recent(n_topics);
  std::vector<std::size_t> all_members;
  std::vector<Article> articles(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Proto& p = protos[i];
    Article& a = articles[i];
    a.id = ids[i];
    a.year = p.year;
    a.fields.push_back(static_cast<Field>(p.field));
    if (p.second_field) a.fields.push_back(static_cast<Field>(*p.second_field));
    a.title = words(p, cfg.title_words, 0.6, 0.25);
    a.abstract = words(p, cfg.abstract_words, 0.35, 0.25);

    const std::size_t want =
        cfg.min_citations + rng.below(cfg.max_citations - cfg.min_citations + 1);
    for (std::size_t c = 0; c < want * 3 && a.out_citations.size() < want; ++c) {
      const double u = rng.uniform();
      const std::vector<std::size_t>* source = &all_members;
      if (p.year > cfg.query_year && !topic_recent[p.topic].empty() && rng.uniform() < 0.5) {
        // Later articles are what give query-year articles their citations.
        source = &topic_recent[p.topic];
      } else if (u < cfg.same_subtopic_citation) {
        source = rng.uniform() < 0.5 && !topic_popular[p.topic].empty() ? &topic_popular[p.topic]
                                                                          : &topic_members[p.topic];
      } else if (u < cfg.same_subtopic_citation + cfg.same_field_citation) {
        source = &field_members[p.field];
      }
      if (source->empty()) continue;
      const std::size_t target = (*source)[rng.below(source->size())];
      if (a.out_citations.insert(ids[target]).second)
        topic_popular[protos[target].topic].push_back(target);
    }
    if (rng.uniform() < cfg.dangling_citation)
      a.out_citations.insert("X" + std::to_string(rng.below(1000000)));
    topic_members[p.topic].push_back(i);
    if (p.year == cfg.query_year) topic_recent[p.topic].push_back(i);
    field_members[p.field].push_back(i);
    all_members.push_back(i);
  }

  // A few records that violate each prefilter rule.
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    if (u < cfg.invalid_share) {
      articles[i].year.reset();
    } else if (u < 2 * cfg.invalid_share) {
      articles[i].title.clear();
    } else if (u < 3 * cfg.invalid_share) {
      articles[i].abstract = "Abstract not available.";
    }
  }

  std::vector<std::vector<double>> topic_centroid(n_topics), field_centroid(n_fields);
  for (auto& c : field_centroid) c = detail::random_unit(rng, cfg.dim);
  for (auto& c : topic_centroid) c = detail::random_unit(rng, cfg.dim);
  // Per-component noise scale giving a noise vector of roughly unit norm.
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  std::vector<std::vector<double>> latent(n, std::vector<double>(cfg.dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < cfg.dim; ++d)
      latent[i][d] = 0.7 * topic_centroid[protos[i].topic][d] +
                     0.5 * field_centroid[protos[i].field][d] + cfg.article_noise * rng.normal() * scale;

  SyntheticData data;
  for (const auto& enc : cfg.encoders) {
    Rng enc_rng(derive_seed(cfg.seed, "encoder", enc.name));
    std::vector<float> values;
    values.reserve(n * cfg.dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < cfg.dim; ++d)
        values.push_back(static_cast<float>(
            latent[i][d] + enc.noise * enc_rng.normal() * scale));
    data.embeddings.emplace(enc.name, EmbeddingStore(cfg.dim, ids, std::move(values)));
  }
  data.corpus = Corpus(std::move(articles));
  return data;
}

}  // namespace citebench
