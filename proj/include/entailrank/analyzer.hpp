// Copyright 2026 The entailrank Authors.
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
#include <string_view>
#include <vector>

#include "entailrank/porter_stemmer.hpp"

namespace entailrank {

struct AnalyzerConfig {
  bool lowercase = true;
  bool stemming = true;
  std::set<std::string> stopwords;
};

namespace detail {

// ASCII letters and digits; bytes >= 0x80 are kept inside tokens so UTF-8
// words are not split apart.
inline bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_lower_alpha(std::string_view s) {
  for (char c : s)
    if (c < 'a' || c > 'z') return false;
  return true;
}

}  // namespace detail

/// Lowercase, split on non-alphanumeric runs, drop stopwords, then stem.
/// Only purely lowercase ASCII alphabetic tokens are stemmed.
inline std::vector<std::string> analyze(std::string_view text, const AnalyzerConfig& cfg) {
  static const PorterStemmer stemmer;
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (!cfg.stopwords.count(cur)) {
      if (cfg.stemming && detail::is_lower_alpha(cur))
        tokens.push_back(stemmer(cur));
      else
        tokens.push_back(cur);
    }
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (detail::is_token_char(c)) {
      if (cfg.lowercase && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      cur.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace entailrank
