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

// Answer selection and micro-averaged precision / recall / F1.

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entailrank/error.hpp"
#include "entailrank/run.hpp"

namespace entailrank {

/// Mean over queries of binary-gain NDCG@1, i.e. top-1 accuracy. Queries with
/// an empty gold set contribute 0.
inline double ndcg_at_1(const RankedRun& run, const GoldSets& gold) {
  if (run.empty()) throw DataError("NDCG@1 of an empty run");
  std::size_t hits = 0;
  for (const auto& [qid, entry] : run) {
    auto g = gold.find(qid);
    if (g == gold.end()) throw DataError("no gold set for query '" + qid + "'");
    if (!entry.empty() && g->second.count(entry.front().para_id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(run.size());
}

/// The first k candidates of every query (fewer if the pool is smaller).
inline Selection select_top_k(const RankedRun& run, std::size_t k = 1) {
  if (k == 0) throw ConfigError("k must be >= 1");
  Selection sel;
  for (const auto& [qid, entry] : run) {
    auto& ids = sel[qid];
    for (std::size_t i = 0; i < entry.size() && i < k; ++i) ids.insert(entry[i].para_id);
  }
  return sel;
}

/// Top-1 plus every candidate scoring at least alpha times the top score.
/// Intended for non-negative scores.
inline Selection select_threshold(const RankedRun& run, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  Selection sel;
  for (const auto& [qid, entry] : run) {
    auto& ids = sel[qid];
    if (entry.empty()) continue;
    const double cut = alpha * entry.front().score;
    ids.insert(entry.front().para_id);
    for (const auto& c : entry)
      if (c.score >= cut) ids.insert(c.para_id);
  }
  return sel;
}

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t num_queries = 0;
  // Queries skipped because their gold set is empty.
  std::vector<std::string> excluded_queries;

  static EvalReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    EvalReport r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    const double t = static_cast<double>(tp);
    r.precision = tp + fp ? t / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn ? t / static_cast<double>(tp + fn) : 0.0;
    const double s = r.precision + r.recall;
    r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
    return r;
  }
};

/// Micro-averaged counts over every query with a non-empty gold set.
/// Gold queries absent from the selection count all their gold as misses.
inline EvalReport evaluate(const Selection& sel, const GoldSets& gold) {
  for (const auto& [qid, ids] : sel)
    if (!gold.count(qid)) throw DataError("no gold entry for selected query '" + qid + "'");
  std::size_t tp = 0, fp = 0, fn = 0, n = 0;
  std::vector<std::string> excluded;
  static const std::set<std::string> kNone;
  for (const auto& [qid, g] : gold) {
    auto it = sel.find(qid);
    if (g.empty()) {
      excluded.push_back(qid);
      continue;
    }
    ++n;
    const auto& pred = it == sel.end() ? kNone : it->second;
    for (const auto& p : pred) (g.count(p) ? tp : fp) += 1;
    for (const auto& x : g)
      if (!pred.count(x)) ++fn;
  }
  EvalReport r = EvalReport::from_counts(tp, fp, fn);
  r.num_queries = n;
  r.excluded_queries = std::move(excluded);
  return r;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["num_queries"] = r.num_queries;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["excluded_queries"] = r.excluded_queries;
  return j;
}

inline std::string report_table(const EvalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "queries    %zu\n"
                "TP         %zu\n"
                "FP         %zu\n"
                "FN         %zu\n"
                "precision  %.4f\n"
                "recall     %.4f\n"
                "f1         %.4f\n",
                r.num_queries, r.tp, r.fp, r.fn, r.precision, r.recall, r.f1);
  return buf;
}

}  // namespace entailrank
