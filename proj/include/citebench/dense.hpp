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
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "citebench/error.hpp"
#include "citebench/parallel.hpp"
#include "citebench/types.hpp"

namespace citebench {

enum class Metric { Cosine, Dot, Euclidean };

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Cosine: return "cosine";
    case Metric::Dot: return "dot";
    case Metric::Euclidean: return "euclidean";
  }
  return "";
}

inline Metric parse_metric(std::string_view s) {
  if (s == "cosine") return Metric::Cosine;
  if (s == "dot") return Metric::Dot;
  if (s == "euclidean") return Metric::Euclidean;
  throw Error("invalid_argument", "unknown similarity metric: " + std::string(s));
}

/// Row-major float32 embeddings, one row per article.
class EmbeddingStore {
 public:
  EmbeddingStore(std::size_t dim, std::vector<ArticleId> ids, std::vector<float> data)
      : dim_(dim), ids_(std::move(ids)), data_(std::move(data)) {
    if (dim_ == 0) throw Error("invalid_argument", "embedding dimension must be positive");
    if (data_.size() != ids_.size() * dim_)
      throw Error("size_mismatch", "embedding matrix has " + std::to_string(data_.size()) +
                                       " values, expected " +
                                       std::to_string(ids_.size() * dim_));
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (!std::isfinite(data_[i]))
        throw Error("non_finite", "non-finite value in embedding row " +
                                      std::to_string(i / dim_) + " (" + ids_[i / dim_] + ")");
    rows_.reserve(ids_.size());
    norms_.reserve(ids_.size());
    for (std::size_t r = 0; r < ids_.size(); ++r) {
      if (!rows_.emplace(ids_[r], r).second)
        throw Error("duplicate_id", "duplicate embedding id: " + ids_[r]);
      double ss = 0.0;
      for (float v : row(r)) ss += static_cast<double>(v) * static_cast<double>(v);
      norms_.push_back(std::sqrt(ss));
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<ArticleId>& ids() const { return ids_; }
  const ArticleId& id(std::size_t r) const { return ids_[r]; }
  double norm(std::size_t r) const { return norms_[r]; }

  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }

  std::optional<std::size_t> find_row(const ArticleId& id) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const ArticleId& id) const { return rows_.contains(id); }

  std::span<const float> vector_for(const ArticleId& id) const {
    auto r = find_row(id);
    if (!r) throw Error("missing_representation", "no embedding for article " + id);
    return row(*r);
  }

 private:
  std::size_t dim_;
  std::vector<ArticleId> ids_;
  std::vector<float> data_;
  std::unordered_map<ArticleId, std::size_t> rows_;
  std::vector<double> norms_;
};

/// Vector file: raw little-endian float32, row-major. Manifest: JSON
/// {"dim": int, "count": int, "ids": [string...]}.
inline EmbeddingStore load_embeddings(const std::string& vector_path,
                                      const std::string& manifest_path) {
  std::ifstream mf(manifest_path);
  if (!mf) throw Error("io", "cannot read embedding manifest " + manifest_path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mf);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed_manifest", manifest_path + ": " + e.what());
  }
  std::size_t dim = 0, count = 0;
  std::vector<ArticleId> ids;
  try {
    dim = manifest.at("dim").get<std::size_t>();
    count = manifest.at("count").get<std::size_t>();
    ids = manifest.at("ids").get<std::vector<ArticleId>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed_manifest", manifest_path + ": " + e.what());
  }
  if (ids.size() != count)
    throw Error("size_mismatch", "manifest lists " + std::to_string(ids.size()) +
                                     " ids but count is " + std::to_string(count));
  std::ifstream vf(vector_path, std::ios::binary | std::ios::ate);
  if (!vf) throw Error("io", "cannot read embedding file " + vector_path);
  const auto bytes = static_cast<std::size_t>(vf.tellg());
  if (bytes != count * dim * 4)
    throw Error("size_mismatch", vector_path + " has " + std::to_string(bytes) +
                                     " bytes, expected " + std::to_string(count * dim * 4));
  vf.seekg(0);
  std::vector<unsigned char> raw(bytes);
  vf.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  std::vector<float> data(count * dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint32_t bits = std::uint32_t{raw[4 * i]} | (std::uint32_t{raw[4 * i + 1]} << 8) |
                               (std::uint32_t{raw[4 * i + 2]} << 16) |
                               (std::uint32_t{raw[4 * i + 3]} << 24);
    std::memcpy(&data[i], &bits, 4);
  }
  return EmbeddingStore(dim, std::move(ids), std::move(data));
}

inline void save_embeddings(const EmbeddingStore& store, const std::string& vector_path,
                            const std::string& manifest_path) {
  std::ofstream vf(vector_path, std::ios::binary);
  if (!vf) throw Error("io", "cannot write " + vector_path);
  for (std::size_t r = 0; r < store.size(); ++r) {
    for (float v : store.row(r)) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      const char b[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                         static_cast<char>((bits >> 16) & 0xFF), static_cast<char>(bits >> 24)};
      vf.write(b, 4);
    }
  }
  std::ofstream mf(manifest_path);
  if (!mf) throw Error("io", "cannot write " + manifest_path);
  mf << nlohmann::json{{"dim", store.dim()}, {"count", store.size()}, {"ids", store.ids()}}.dump()
     << '\n';
}

/// Similarity of `query` to row `r`; larger is closer for every metric
/// (euclidean reports the negated L2 distance). Accumulates in double.
inline double similarity(const EmbeddingStore& store, std::span<const float> query,
                         double query_norm, std::size_t r, Metric metric) {
  const auto v = store.row(r);
  if (metric == Metric::Euclidean) {
    double ss = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = static_cast<double>(query[i]) - static_cast<double>(v[i]);
      ss += d * d;
    }
    return -std::sqrt(ss);
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    dot += static_cast<double>(query[i]) * static_cast<double>(v[i]);
  if (metric == Metric::Dot) return dot;
  const double denom = query_norm * store.norm(r);
  return denom == 0.0 ? 0.0 : dot / denom;
}

struct KnnOptions {
  const IdSet* pool = nullptr;
  const ArticleId* exclude = nullptr;
  std::size_t threads = 1;
};

/// Exact top-k by exhaustive scan. Rows are split into per-thread chunks,
/// each keeps a partial top-k, and the merge applies the same total order
/// (score desc, id asc), so results do not depend on the thread count.
inline std::vector<ScoredId> knn(const EmbeddingStore& store, std::span<const float> query,
                                 std::size_t k, Metric metric, const KnnOptions& options = {}) {
  if (k == 0) throw Error("invalid_argument", "knn: k must be positive");
  if (query.size() != store.dim())
    throw Error("dimension_mismatch", "query has dimension " + std::to_string(query.size()) +
                                          ", store has " + std::to_string(store.dim()));
  std::vector<std::size_t> rows;
  if (options.pool != nullptr) {
    for (const auto& id : *options.pool)
      if (auto r = store.find_row(id)) rows.push_back(*r);
  } else {
    rows.resize(store.size());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  }
  if (options.exclude != nullptr)
    if (auto r = store.find_row(*options.exclude))
      rows.erase(std::remove(rows.begin(), rows.end(), *r), rows.end());

  double qn = 0.0;
  for (float v : query) qn += static_cast<double>(v) * static_cast<double>(v);
  qn = std::sqrt(qn);

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, rows.size()));
  const std::size_t chunk = rows.empty() ? 0 : (rows.size() + threads - 1) / threads;
  std::vector<std::vector<ScoredId>> partial(threads);
  parallel_for(threads, threads, [&](std::size_t t) {
    const std::size_t lo = std::min(rows.size(), t * chunk);
    const std::size_t hi = std::min(rows.size(), lo + chunk);
    auto& local = partial[t];
    local.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i)
      local.push_back({store.id(rows[i]), similarity(store, query, qn, rows[i], metric)});
    const std::size_t keep = std::min(k, local.size());
    std::partial_sort(local.begin(), local.begin() + static_cast<std::ptrdiff_t>(keep),
                      local.end(), ranks_before);
    local.resize(keep);
  });
  std::vector<ScoredId> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  const std::size_t keep = std::min(k, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(keep),
                    merged.end(), ranks_before);
  merged.resize(keep);
  return merged;
}

}  // namespace citebench
