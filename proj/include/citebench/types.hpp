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

#include <set>
#include <string>
#include <vector>

namespace citebench {

using ArticleId = std::string;
using IdSet = std::set<ArticleId>;

struct ScoredId {
  ArticleId id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

/// Total ranking order used everywhere: higher score first, ties by ascending id.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

inline std::vector<ArticleId> ids_of(const std::vector<ScoredId>& ranked) {
  std::vector<ArticleId> out;
  out.reserve(ranked.size());
  for (const auto& s : ranked) out.push_back(s.id);
  return out;
}

inline IdSet set_difference(const IdSet& a, const IdSet& b) {
  IdSet out;
  for (const auto& x : a)
    if (!b.contains(x)) out.insert(out.end(), x);
  return out;
}

inline IdSet set_intersection(const IdSet& a, const IdSet& b) {
  const IdSet& small = a.size() <= b.size() ? a : b;
  const IdSet& large = a.size() <= b.size() ? b : a;
  IdSet out;
  for (const auto& x : small)
    if (large.contains(x)) out.insert(out.end(), x);
  return out;
}

}  // namespace citebench
