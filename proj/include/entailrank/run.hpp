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

// Ranked runs and answer selections, plus their TSV file formats:
//   run:       query_id \t para_id \t rank \t score
//   selection: query_id \t para_id

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "entailrank/detail/numeric.hpp"
#include "entailrank/detail/text.hpp"
#include "entailrank/error.hpp"

namespace entailrank {

struct ScoredCandidate {
  std::string para_id;
  double score = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

/// Per query: candidates in descending score, ties by ascending para_id.
using RankedRun = std::map<std::string, std::vector<ScoredCandidate>>;

/// Per query: the predicted para_ids.
using Selection = std::map<std::string, std::set<std::string>>;

using GoldSets = std::map<std::string, std::set<std::string>>;

inline bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.para_id < b.para_id;
}

inline void sort_ranked(std::vector<ScoredCandidate>& entry) {
  std::sort(entry.begin(), entry.end(), ranks_before);
}

inline std::string format_run(const RankedRun& run) {
  std::string out;
  for (const auto& [qid, entry] : run) {
    std::size_t rank = 1;
    for (const auto& c : entry) {
      out += qid + '\t' + c.para_id + '\t' + std::to_string(rank++) + '\t' +
             detail::format_double(c.score) + '\n';
    }
  }
  return out;
}

inline std::string format_selection(const Selection& sel) {
  std::string out;
  for (const auto& [qid, ids] : sel)
    for (const auto& pid : ids) out += qid + '\t' + pid + '\n';
  return out;
}

inline void write_run_file(const RankedRun& run, const std::string& path) {
  detail::write_file(path, format_run(run));
}

inline void write_selection_file(const Selection& sel, const std::string& path) {
  detail::write_file(path, format_selection(sel));
}

namespace detail {

template <typename Fn>
void for_each_line(const std::string& content, Fn&& fn) {
  std::size_t line_no = 0, start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    auto line = strip_cr(std::string_view(content).substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    fn(line_no, line);
  }
}

}  // namespace detail

/// Parses a run file. Within a query the rank column must run 1..n and agree
/// with descending score order (ties by ascending para_id).
inline RankedRun parse_run(const std::string& content, const std::string& source) {
  struct Row {
    std::int64_t rank;
    std::size_t line;
    ScoredCandidate cand;
  };
  std::map<std::string, std::vector<Row>> rows;
  std::map<std::string, std::set<std::string>> seen;
  detail::for_each_line(content, [&](std::size_t ln, std::string_view line) {
    auto f = detail::split(line, '\t');
    if (f.size() != 4) throw ParseError(source, ln, "expected 4 tab-separated fields");
    if (f[0].empty() || f[1].empty()) throw ParseError(source, ln, "empty id");
    auto rank = detail::parse_int(f[2]);
    if (!rank || *rank < 1) throw ParseError(source, ln, "invalid rank '" + std::string(f[2]) + "'");
    auto score = detail::parse_finite_double(f[3]);
    if (!score) throw ParseError(source, ln, "invalid score '" + std::string(f[3]) + "'");
    std::string qid(f[0]), pid(f[1]);
    if (!seen[qid].insert(pid).second)
      throw ParseError(source, ln, "duplicate pair (" + qid + ", " + pid + ")");
    rows[qid].push_back({*rank, ln, {pid, *score}});
  });
  RankedRun run;
  for (auto& [qid, list] : rows) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Row& a, const Row& b) { return a.rank < b.rank; });
    auto& entry = run[qid];
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].rank != static_cast<std::int64_t>(i + 1))
        throw ParseError(source, list[i].line, "ranks of query '" + qid + "' are not 1..n");
      if (i > 0 && !ranks_before(list[i - 1].cand, list[i].cand))
        throw ParseError(source, list[i].line,
                         "rank order of query '" + qid + "' disagrees with scores");
      entry.push_back(list[i].cand);
    }
  }
  return run;
}

inline RankedRun read_run_file(const std::string& path) {
  return parse_run(detail::read_file(path), path);
}

inline Selection parse_selection(const std::string& content, const std::string& source) {
  Selection sel;
  detail::for_each_line(content, [&](std::size_t ln, std::string_view line) {
    auto f = detail::split(line, '\t');
    if (f.size() != 2) throw ParseError(source, ln, "expected 2 tab-separated fields");
    if (f[0].empty() || f[1].empty()) throw ParseError(source, ln, "empty id");
    if (!sel[std::string(f[0])].insert(std::string(f[1])).second)
      throw ParseError(source, ln,
                       "duplicate pair (" + std::string(f[0]) + ", " + std::string(f[1]) + ")");
  });
  return sel;
}

inline Selection read_selection_file(const std::string& path) {
  return parse_selection(detail::read_file(path), path);
}

}  // namespace entailrank
