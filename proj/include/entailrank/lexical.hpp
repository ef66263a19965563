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

// BM25 and Dirichlet-smoothed query likelihood over a TermIndex.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "entailrank/analyzer.hpp"
#include "entailrank/corpus.hpp"
#include "entailrank/detail/numeric.hpp"
#include "entailrank/detail/parallel.hpp"
#include "entailrank/run.hpp"
#include "entailrank/term_index.hpp"

namespace entailrank {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;

  void validate() const {
    if (!(k1 > 0.0) || !std::isfinite(k1)) throw ConfigError("bm25 k1 must be > 0");
    if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("bm25 b must lie in [0, 1]");
  }
};

struct QldParams {
  double mu = 1000.0;

  void validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("qld mu must be finite and > 0");
  }
};

/// Non-negative IDF: ln(1 + (N - df + 0.5) / (df + 0.5)).
inline double bm25_idf(std::size_t num_docs, std::size_t df) {
  const double n = static_cast<double>(num_docs);
  const double f = static_cast<double>(df);
  return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

/// Sum over query tokens (duplicates count once per occurrence) of
/// IDF(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avgdl)).
inline double bm25_score(const TermIndex& idx, const std::vector<std::string>& query_tokens,
                         const std::string& doc_id, const Bm25Params& p = {}) {
  p.validate();
  const std::size_t doc = idx.doc_index(doc_id);
  const double len = static_cast<double>(idx.doc_len[doc]);
  const double norm = idx.avgdl > 0.0 ? len / idx.avgdl : 0.0;
  const double denom_k = p.k1 * (1.0 - p.b + p.b * norm);
  double score = 0.0;
  for (const auto& t : query_tokens) {
    const std::size_t tf = idx.tf(t, doc);
    if (tf == 0) continue;
    const double f = static_cast<double>(tf);
    score += bm25_idf(idx.num_docs(), idx.doc_freq(t)) * f * (p.k1 + 1.0) / (f + denom_k);
  }
  return score;
}

/// Rank-equivalent form of log p(q|d) under Dirichlet smoothing:
///   sum_t c(t,q) ln(1 + c(t,d) / (mu P(t|C))) + |q| ln(mu / (len(d) + mu)).
/// Query tokens absent from the collection are dropped, and |q| counts only
/// the tokens that remain.
inline double qld_score(const TermIndex& idx, const std::vector<std::string>& query_tokens,
                        const std::string& doc_id, const QldParams& p = {}) {
  p.validate();
  const std::size_t doc = idx.doc_index(doc_id);
  if (idx.collection_len == 0) throw DataError("query likelihood needs a non-empty collection");
  const double clen = static_cast<double>(idx.collection_len);
  const double len = static_cast<double>(idx.doc_len[doc]);
  double score = 0.0;
  std::size_t kept = 0;
  for (const auto& t : query_tokens) {
    const std::size_t ctf = idx.coll_freq(t);
    if (ctf == 0) continue;
    ++kept;
    const std::size_t tf = idx.tf(t, doc);
    if (tf == 0) continue;
    const double p_c = static_cast<double>(ctf) / clen;
    score += std::log1p(static_cast<double>(tf) / (p.mu * p_c));
  }
  score += static_cast<double>(kept) * std::log(p.mu / (len + p.mu));
  return score;
}

enum class LexicalScorer { bm25, qld };

inline const char* scorer_name(LexicalScorer s) { return s == LexicalScorer::bm25 ? "bm25" : "qld"; }

struct LexicalParams {
  Bm25Params bm25;
  QldParams qld;
};

inline double lexical_score(LexicalScorer s, const TermIndex& idx,
                            const std::vector<std::string>& q, const std::string& doc_id,
                            const LexicalParams& params) {
  return s == LexicalScorer::bm25 ? bm25_score(idx, q, doc_id, params.bm25)
                                  : qld_score(idx, q, doc_id, params.qld);
}

/// Scores every candidate of one query case against its own pool.
inline std::vector<ScoredCandidate> rank_lexical(const QueryInstance& instance,
                                                 const AnalyzerConfig& cfg, LexicalScorer scorer,
                                                 const LexicalParams& params = {}) {
  if (instance.candidates.empty())
    throw IntegrityError("query '" + instance.query_id + "' has no candidates");
  const TermIndex idx = build_index(instance.candidates, cfg);
  const auto q = analyze(instance.query_clean, cfg);
  std::vector<ScoredCandidate> out;
  out.reserve(instance.candidates.size());
  for (const auto& p : instance.candidates)
    out.push_back({p.para_id, lexical_score(scorer, idx, q, p.para_id, params)});
  sort_ranked(out);
  return out;
}

/// Which documents feed the term statistics: each query's own candidate pool,
/// or every candidate paragraph of the dataset pooled together.
enum class CollectionScope { per_query, global };

struct PairKey {
  std::string query_id;
  std::string para_id;

  auto operator<=>(const PairKey&) const = default;
};

struct LexicalPairScores {
  double bm25 = 0.0;
  double qld = 0.0;
};

using LexicalScores = std::map<PairKey, LexicalPairScores>;

/// BM25 and QLD for every (query, candidate) pair of the dataset.
inline LexicalScores compute_lexical_scores(const Dataset& d, const AnalyzerConfig& cfg,
                                            const LexicalParams& params = {},
                                            CollectionScope scope = CollectionScope::per_query,
                                            unsigned workers = 1) {
  params.bm25.validate();
  params.qld.validate();
  std::vector<std::vector<LexicalPairScores>> per_query(d.instances.size());

  if (scope == CollectionScope::per_query) {
    detail::parallel_for(d.instances.size(), workers, [&](std::size_t i) {
      const auto& inst = d.instances[i];
      const TermIndex idx = build_index(inst.candidates, cfg);
      const auto q = analyze(inst.query_clean, cfg);
      for (const auto& p : inst.candidates)
        per_query[i].push_back({bm25_score(idx, q, p.para_id, params.bm25),
                                qld_score(idx, q, p.para_id, params.qld)});
    });
  } else {
    // Composite ids: a tab never occurs inside TSV-borne ids.
    std::vector<TokenizedDoc> docs;
    for (const auto& inst : d.instances)
      for (const auto& p : inst.candidates)
        docs.emplace_back(inst.query_id + '\t' + p.para_id, analyze(p.clean_text, cfg));
    const TermIndex idx = build_index_from_tokens(std::move(docs));
    detail::parallel_for(d.instances.size(), workers, [&](std::size_t i) {
      const auto& inst = d.instances[i];
      const auto q = analyze(inst.query_clean, cfg);
      for (const auto& p : inst.candidates) {
        const std::string key = inst.query_id + '\t' + p.para_id;
        per_query[i].push_back(
            {bm25_score(idx, q, key, params.bm25), qld_score(idx, q, key, params.qld)});
      }
    });
  }

  LexicalScores out;
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    const auto& inst = d.instances[i];
    for (std::size_t j = 0; j < inst.candidates.size(); ++j)
      out[{inst.query_id, inst.candidates[j].para_id}] = per_query[i][j];
  }
  return out;
}

/// Ranked run for one scorer out of precomputed pair scores.
inline RankedRun lexical_run(const LexicalScores& scores, LexicalScorer s) {
  RankedRun run;
  for (const auto& [key, v] : scores)
    run[key.query_id].push_back({key.para_id, s == LexicalScorer::bm25 ? v.bm25 : v.qld});
  for (auto& [qid, entry] : run) sort_ranked(entry);
  return run;
}

/// Score dump: query_id \t para_id \t scorer_name \t score, one line per
/// pair and scorer.
inline std::string format_lexical_dump(const LexicalScores& scores) {
  std::string out;
  for (const auto& [key, v] : scores) {
    out += key.query_id + '\t' + key.para_id + "\tbm25\t" + detail::format_double(v.bm25) + '\n';
    out += key.query_id + '\t' + key.para_id + "\tqld\t" + detail::format_double(v.qld) + '\n';
  }
  return out;
}

}  // namespace entailrank
