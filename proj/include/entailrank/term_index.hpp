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

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entailrank/analyzer.hpp"
#include "entailrank/corpus.hpp"
#include "entailrank/error.hpp"

namespace entailrank {

struct Posting {
  std::size_t doc = 0;  // index into TermIndex::doc_ids
  std::size_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Term and document statistics for one collection. Documents are stored in
/// ascending id order, so the index does not depend on insertion order.
struct TermIndex {
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_len;
  double avgdl = 0.0;
  std::map<std::string, std::vector<Posting>> postings;
  std::map<std::string, std::size_t> df;
  std::map<std::string, std::size_t> collection_tf;
  std::size_t collection_len = 0;

  std::size_t num_docs() const { return doc_ids.size(); }

  std::optional<std::size_t> find_doc(const std::string& id) const {
    auto it = std::lower_bound(doc_ids.begin(), doc_ids.end(), id);
    if (it == doc_ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - doc_ids.begin());
  }

  std::size_t doc_index(const std::string& id) const {
    auto d = find_doc(id);
    if (!d) throw DataError("unknown doc_id '" + id + "'");
    return *d;
  }

  std::size_t tf(const std::string& term, std::size_t doc) const {
    auto it = postings.find(term);
    if (it == postings.end()) return 0;
    auto p = std::lower_bound(it->second.begin(), it->second.end(), doc,
                              [](const Posting& a, std::size_t d) { return a.doc < d; });
    return (p != it->second.end() && p->doc == doc) ? p->tf : 0;
  }

  std::size_t doc_freq(const std::string& term) const {
    auto it = df.find(term);
    return it == df.end() ? 0 : it->second;
  }

  std::size_t coll_freq(const std::string& term) const {
    auto it = collection_tf.find(term);
    return it == collection_tf.end() ? 0 : it->second;
  }

  bool operator==(const TermIndex&) const = default;
};

using TokenizedDoc = std::pair<std::string, std::vector<std::string>>;

inline TermIndex build_index_from_tokens(std::vector<TokenizedDoc> docs) {
  if (docs.empty()) throw DataError("cannot index an empty pool");
  std::sort(docs.begin(), docs.end(),
            [](const TokenizedDoc& a, const TokenizedDoc& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < docs.size(); ++i)
    if (docs[i].first == docs[i - 1].first)
      throw IntegrityError("duplicate para_id '" + docs[i].first + "'");

  TermIndex idx;
  std::size_t total_len = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    idx.doc_ids.push_back(docs[d].first);
    idx.doc_len.push_back(docs[d].second.size());
    total_len += docs[d].second.size();
    std::map<std::string, std::size_t> counts;
    for (const auto& t : docs[d].second) ++counts[t];
    for (const auto& [term, tf] : counts) {
      idx.postings[term].push_back({d, tf});
      ++idx.df[term];
      idx.collection_tf[term] += tf;
    }
  }
  idx.collection_len = total_len;
  idx.avgdl = static_cast<double>(total_len) / static_cast<double>(docs.size());
  return idx;
}

inline TermIndex build_index(const std::vector<Paragraph>& pool, const AnalyzerConfig& cfg) {
  std::vector<TokenizedDoc> docs;
  docs.reserve(pool.size());
  for (const auto& p : pool) docs.emplace_back(p.para_id, analyze(p.clean_text, cfg));
  return build_index_from_tokens(std::move(docs));
}

}  // namespace entailrank
