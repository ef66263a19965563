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

// Query cases, candidate paragraphs, ingestion, statistics and splits.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entailrank/detail/text.hpp"
#include "entailrank/error.hpp"

namespace entailrank {

struct Paragraph {
  std::string para_id;
  std::string raw_text;
  std::string clean_text;

  bool operator==(const Paragraph&) const = default;
};

struct QueryInstance {
  std::string query_id;
  std::string query_text;
  std::string query_clean;
  std::vector<Paragraph> candidates;
  std::set<std::string> gold;

  bool operator==(const QueryInstance&) const = default;
};

enum class SplitTag { train, valid, test, custom };

struct Dataset {
  std::vector<QueryInstance> instances;
  SplitTag split_tag = SplitTag::custom;
};

struct StatsReport {
  std::size_t num_queries = 0;
  double avg_candidates_per_query = 0.0;
  double avg_positives_per_query = 0.0;
  double avg_query_length = 0.0;
  double avg_candidate_length = 0.0;

  bool operator==(const StatsReport&) const = default;
};

/// Compiled placeholder patterns. The default matches any uppercase word
/// ending in `_SUPPRESSED` (FRAGMENT_SUPPRESSED, REFERENCE_SUPPRESSED, ...).
class PlaceholderFilter {
 public:
  static constexpr const char* kDefaultPattern = R"(\b[A-Z][A-Z0-9_]*_SUPPRESSED\b)";

  PlaceholderFilter() : PlaceholderFilter(std::vector<std::string>{kDefaultPattern}) {}

  explicit PlaceholderFilter(const std::vector<std::string>& patterns) : sources_(patterns) {
    for (const auto& p : patterns) {
      if (p.empty()) throw ConfigError("empty placeholder pattern");
      try {
        compiled_.emplace_back(p, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw ConfigError("invalid placeholder pattern '" + p + "': " + e.what());
      }
    }
  }

  const std::vector<std::string>& patterns() const { return sources_; }

  /// Deletes every match of every pattern and collapses whitespace runs to a
  /// single space (trimmed). Repeats to a fixed point, so the result is
  /// idempotent even for patterns whose deletions expose new matches.
  std::string clean(const std::string& raw) const {
    std::string cur = collapse(strip(raw));
    while (true) {
      std::string next = collapse(strip(cur));
      if (next == cur) return cur;
      cur = std::move(next);
    }
  }

 private:
  std::string strip(const std::string& s) const {
    std::string out = s;
    for (const auto& re : compiled_) out = std::regex_replace(out, re, "");
    return out;
  }

  static std::string collapse(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
      bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
      if (ws) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
    return out;
  }

  std::vector<std::string> sources_;
  std::vector<std::regex> compiled_;
};

inline std::string clean_text(const std::string& raw, const std::vector<std::string>& patterns) {
  return PlaceholderFilter(patterns).clean(raw);
}

/// Checks the QueryInstance invariants plus query id uniqueness.
inline void validate_dataset(const Dataset& d) {
  std::set<std::string> qids;
  for (const auto& q : d.instances) {
    if (q.query_id.empty()) throw IntegrityError("empty query_id");
    if (!qids.insert(q.query_id).second)
      throw IntegrityError("duplicate query_id '" + q.query_id + "'");
    if (q.candidates.empty())
      throw IntegrityError("query '" + q.query_id + "' has no candidates");
    std::set<std::string> pids;
    for (const auto& p : q.candidates) {
      if (p.para_id.empty())
        throw IntegrityError("query '" + q.query_id + "' has a candidate with empty para_id");
      if (!pids.insert(p.para_id).second)
        throw IntegrityError("query '" + q.query_id + "': duplicate para_id '" + p.para_id + "'");
    }
    for (const auto& g : q.gold)
      if (!pids.count(g))
        throw IntegrityError("query '" + q.query_id + "': gold id '" + g +
                             "' is not among the candidates");
  }
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           const std::string& src, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(src, line, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::string& src, std::size_t line) {
  const auto& v = require_field(obj, key, src, line);
  if (!v.is_string()) throw ParseError(src, line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

/// Parses JSONL text (one query case per line). Blank lines are skipped.
inline Dataset parse_jsonl(const std::string& content, const std::string& source,
                           const PlaceholderFilter& filter = PlaceholderFilter()) {
  Dataset d;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line(detail::strip_cr(std::string_view(content).substr(start, end - start)));
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(source, line_no, "expected a JSON object");

    QueryInstance q;
    q.query_id = detail::require_string(obj, "query_id", source, line_no);
    q.query_text = detail::require_string(obj, "query_text", source, line_no);
    q.query_clean = filter.clean(q.query_text);
    const auto& cands = detail::require_field(obj, "candidates", source, line_no);
    if (!cands.is_array()) throw ParseError(source, line_no, "'candidates' must be an array");
    for (const auto& c : cands) {
      if (!c.is_object()) throw ParseError(source, line_no, "candidate must be an object");
      Paragraph p;
      p.para_id = detail::require_string(c, "para_id", source, line_no);
      p.raw_text = detail::require_string(c, "text", source, line_no);
      p.clean_text = filter.clean(p.raw_text);
      q.candidates.push_back(std::move(p));
    }
    if (auto g = obj.find("gold"); g != obj.end() && !g->is_null()) {
      if (!g->is_array()) throw ParseError(source, line_no, "'gold' must be an array");
      for (const auto& id : *g) {
        if (!id.is_string()) throw ParseError(source, line_no, "gold ids must be strings");
        q.gold.insert(id.get<std::string>());
      }
    }
    d.instances.push_back(std::move(q));
  }
  validate_dataset(d);
  return d;
}

inline Dataset ingest_jsonl(const std::string& path,
                            const PlaceholderFilter& filter = PlaceholderFilter()) {
  return parse_jsonl(detail::read_file(path), path, filter);
}

/// Canonical JSONL serialization. Raw text is written, so re-ingesting with
/// the same filter reproduces the clean text.
inline std::string to_jsonl(const Dataset& d) {
  std::string out;
  for (const auto& q : d.instances) {
    nlohmann::ordered_json obj;
    obj["query_id"] = q.query_id;
    obj["query_text"] = q.query_text;
    auto cands = nlohmann::ordered_json::array();
    for (const auto& p : q.candidates)
      cands.push_back(nlohmann::ordered_json{{"para_id", p.para_id}, {"text", p.raw_text}});
    obj["candidates"] = std::move(cands);
    obj["gold"] = std::vector<std::string>(q.gold.begin(), q.gold.end());
    out += obj.dump();
    out += '\n';
  }
  return out;
}

inline void write_jsonl(const Dataset& d, const std::string& path) {
  detail::write_file(path, to_jsonl(d));
}

/// On-disk names for the directory adapter. The defaults follow the layout
/// COLIEE distributes: <root>/<case>/entailed_fragment.txt and
/// <root>/<case>/paragraphs/NNN.txt.
struct ColieeLayout {
  std::string query_file = "entailed_fragment.txt";
  std::string paragraph_dir = "paragraphs";
};

namespace detail {
inline std::string file_stem(const std::string& name) {
  return std::filesystem::path(name).stem().string();
}
}  // namespace detail

/// Reads a directory with one subdirectory per query case. `labels_path`
/// (empty = test mode) is a JSON object mapping query ids to lists of
/// paragraph filenames.
inline Dataset ingest_coliee_dir(const std::string& root, const std::string& labels_path = "",
                                 const ColieeLayout& layout = {},
                                 const PlaceholderFilter& filter = PlaceholderFilter()) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a directory: " + root);

  std::vector<fs::path> case_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) case_dirs.push_back(entry.path());
  std::sort(case_dirs.begin(), case_dirs.end());

  Dataset d;
  for (const auto& dir : case_dirs) {
    QueryInstance q;
    q.query_id = dir.filename().string();
    fs::path qfile = dir / layout.query_file;
    if (!fs::is_regular_file(qfile))
      throw IntegrityError("query '" + q.query_id + "': missing " + qfile.string());
    q.query_text = detail::read_file(qfile.string());
    q.query_clean = filter.clean(q.query_text);

    fs::path pdir = dir / layout.paragraph_dir;
    if (!fs::is_directory(pdir))
      throw IntegrityError("query '" + q.query_id + "': missing " + pdir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(pdir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      Paragraph p;
      p.para_id = f.stem().string();
      p.raw_text = detail::read_file(f.string());
      p.clean_text = filter.clean(p.raw_text);
      q.candidates.push_back(std::move(p));
    }
    d.instances.push_back(std::move(q));
  }

  if (!labels_path.empty()) {
    nlohmann::json labels;
    try {
      labels = nlohmann::json::parse(detail::read_file(labels_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(labels_path, 1, std::string("invalid JSON: ") + e.what());
    }
    if (!labels.is_object()) throw ParseError(labels_path, 1, "labels must be a JSON object");
    std::map<std::string, QueryInstance*> by_id;
    for (auto& q : d.instances) by_id[q.query_id] = &q;
    for (auto it = labels.begin(); it != labels.end(); ++it) {
      auto q = by_id.find(it.key());
      if (q == by_id.end())
        throw IntegrityError("labels reference unknown query '" + it.key() + "'");
      if (!it.value().is_array())
        throw ParseError(labels_path, 1, "labels for '" + it.key() + "' must be an array");
      for (const auto& name : it.value()) {
        if (!name.is_string()) throw ParseError(labels_path, 1, "label entries must be strings");
        std::string pid = detail::file_stem(name.get<std::string>());
        bool known = std::any_of(q->second->candidates.begin(), q->second->candidates.end(),
                                 [&](const Paragraph& p) { return p.para_id == pid; });
        if (!known)
          throw IntegrityError("query '" + it.key() + "': label '" + name.get<std::string>() +
                               "' names no paragraph");
        q->second->gold.insert(pid);
      }
    }
  }
  validate_dataset(d);
  return d;
}

/// Lengths are whitespace-token counts of the cleaned text.
inline StatsReport dataset_stats(const Dataset& d) {
  StatsReport r;
  r.num_queries = d.instances.size();
  if (r.num_queries == 0) return r;
  std::size_t cands = 0, pos = 0, qlen = 0, clen = 0;
  for (const auto& q : d.instances) {
    cands += q.candidates.size();
    pos += q.gold.size();
    qlen += detail::whitespace_token_count(q.query_clean);
    for (const auto& p : q.candidates) clen += detail::whitespace_token_count(p.clean_text);
  }
  const double n = static_cast<double>(r.num_queries);
  r.avg_candidates_per_query = static_cast<double>(cands) / n;
  r.avg_positives_per_query = static_cast<double>(pos) / n;
  r.avg_query_length = static_cast<double>(qlen) / n;
  r.avg_candidate_length = cands ? static_cast<double>(clen) / static_cast<double>(cands) : 0.0;
  return r;
}

/// Seeded uniform split. The second dataset holds exactly `n` instances;
/// both halves keep the input order.
inline std::pair<Dataset, Dataset> split_validation(const Dataset& d, std::size_t n,
                                                    std::uint64_t seed) {
  const std::size_t total = d.instances.size();
  if (n == 0 || n >= total)
    throw ConfigError("validation size " + std::to_string(n) + " must be in (0, " +
                      std::to_string(total) + ")");
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  // Partial Fisher-Yates with an explicit bounded draw, so the split does not
  // depend on the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t range = total - i;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t r;
    do r = rng(); while (r >= limit);
    std::swap(order[i], order[i + static_cast<std::size_t>(r % range)]);
  }
  std::vector<bool> in_valid(total, false);
  for (std::size_t i = 0; i < n; ++i) in_valid[order[i]] = true;

  Dataset train, valid;
  train.split_tag = SplitTag::train;
  valid.split_tag = SplitTag::valid;
  for (std::size_t i = 0; i < total; ++i)
    (in_valid[i] ? valid : train).instances.push_back(d.instances[i]);
  return {std::move(train), std::move(valid)};
}

/// Gold sets keyed by query id.
inline std::map<std::string, std::set<std::string>> gold_map(const Dataset& d) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& q : d.instances) out[q.query_id] = q.gold;
  return out;
}

}  // namespace entailrank
