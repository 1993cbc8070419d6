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

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "citebench/utf8.hpp"

namespace citebench {

enum class Stemming { None };

struct AnalyzerConfig {
  bool lowercase = true;
  std::optional<std::unordered_set<std::string>> stopwords;
  Stemming stemming = Stemming::None;
};

namespace detail {

inline bool is_ascii_alnum(char32_t c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

/// Word characters: ASCII letters/digits plus every non-ASCII code point
/// outside the common punctuation, symbol and space blocks.
inline bool is_word_char(char32_t c) {
  if (c < 0x80) return is_ascii_alnum(c);
  if (c == utf8::kReplacement) return false;
  if (c >= 0x80 && c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, math
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c >= 0xFF1A && c <= 0xFF20) return false;
  if (c >= 0xFF3B && c <= 0xFF40) return false;
  if (c >= 0xFF5B && c <= 0xFF65) return false;
  return true;
}

inline bool is_letter_like(char32_t c) { return is_word_char(c) && !is_digit(c); }

inline char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0x80) return c;
  if ((c >= 0xC0 && c <= 0xDE && c != 0xD7)) return c + 0x20;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  if (c == 0x178) return 0xFF;
  if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x138 && c != 0x149 && c != 0x17F) {
    // Latin Extended-A alternates upper/lower, with the parity flipping at U+0139..U+0148
    // and U+0179..U+017E.
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    const bool upper = odd_upper ? (c % 2 == 1) : (c % 2 == 0);
    return upper ? c + 1 : c;
  }
  return c;
}

}  // namespace detail

/// Splits text into word tokens in document order. A token is a maximal run
/// of word characters; an apostrophe between two letters and a period
/// between two digits stay inside the token ("don't", "3.14").
inline std::vector<std::string> analyze(std::string_view text, const AnalyzerConfig& config = {}) {
  std::vector<char32_t> cps;
  cps.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) cps.push_back(utf8::decode(text, pos));

  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!config.stopwords || !config.stopwords->contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i];
    bool word = detail::is_word_char(c);
    if (!word && !current.empty() && i + 1 < cps.size()) {
      const char32_t prev = cps[i - 1];
      const char32_t next = cps[i + 1];
      if ((c == '\'' || c == 0x2019) && detail::is_letter_like(prev) &&
          detail::is_letter_like(next)) {
        word = true;
        c = '\'';
      } else if (c == '.' && detail::is_digit(prev) && detail::is_digit(next)) {
        word = true;
      }
    }
    if (word) {
      utf8::append(current, config.lowercase ? detail::to_lower(c) : c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace citebench
