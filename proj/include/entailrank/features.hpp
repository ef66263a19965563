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

// Feature schema, external score files, and the per-pair feature matrix.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entailrank/corpus.hpp"
#include "entailrank/detail/numeric.hpp"
#include "entailrank/detail/parallel.hpp"
#include "entailrank/detail/text.hpp"
#include "entailrank/error.hpp"
#include "entailrank/lexical.hpp"
#include "entailrank/run.hpp"

namespace entailrank {

namespace feature_names {
inline constexpr const char* query_length = "query_length";
inline constexpr const char* candidate_length = "candidate_length";
inline constexpr const char* bm25 = "bm25";
inline constexpr const char* qld = "qld";
}  // namespace feature_names

inline bool is_builtin_feature(const std::string& name) {
  return name == feature_names::query_length || name == feature_names::candidate_length ||
         name == feature_names::bm25 || name == feature_names::qld;
}

class FeatureSchema {
 public:
  FeatureSchema() : FeatureSchema(default_names()) {}

  explicit FeatureSchema(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ConfigError("feature schema is empty");
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty() || n.find_first_of(",\t\n ") != std::string::npos)
        throw ConfigError("invalid feature name '" + n + "'");
      if (!seen.insert(n).second) throw ConfigError("duplicate feature name '" + n + "'");
    }
  }

  static std::vector<std::string> default_names() {
    return {"query_length",    "candidate_length", "bm25",
            "qld",             "bert_large",       "roberta_large",
            "legal_bert_base", "deberta_v3_large", "monot5_3b"};
  }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::string joined() const {
    std::string out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (i) out += ',';
      out += names_[i];
    }
    return out;
  }

  std::string fingerprint() const { return detail::to_hex(detail::fnv1a64(joined())); }

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Scores from one external model, keyed by (query_id, para_id).
struct ScoreFile {
  std::string model_name;
  std::map<PairKey, double> entries;

  double min_score() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [k, v] : entries) m = std::min(m, v);
    return m;
  }
};

/// TSV lines: query_id \t para_id \t score.
inline ScoreFile parse_score_file(const std::string& content, const std::string& source,
                                  const std::string& model_name) {
  ScoreFile sf;
  sf.model_name = model_name;
  detail::for_each_line(content, [&](std::size_t ln, std::string_view line) {
    auto f = detail::split(line, '\t');
    if (f.size() != 3) throw ParseError(source, ln, "expected 3 tab-separated fields");
    if (f[0].empty() || f[1].empty()) throw ParseError(source, ln, "empty id");
    auto v = detail::parse_finite_double(f[2]);
    if (!v) throw ParseError(source, ln, "invalid score '" + std::string(f[2]) + "'");
    PairKey key{std::string(f[0]), std::string(f[1])};
    if (!sf.entries.emplace(key, *v).second)
      throw ParseError(source, ln, "duplicate pair (" + key.query_id + ", " + key.para_id + ")");
  });
  return sf;
}

inline ScoreFile load_score_file(const std::string& path, const std::string& model_name) {
  return parse_score_file(detail::read_file(path), path, model_name);
}

inline std::string format_score_file(const ScoreFile& sf) {
  std::string out;
  for (const auto& [k, v] : sf.entries)
    out += k.query_id + '\t' + k.para_id + '\t' + detail::format_double(v) + '\n';
  return out;
}

struct FeatureRow {
  std::string query_id;
  std::string para_id;
  std::optional<int> label;
  std::vector<double> values;

  bool operator==(const FeatureRow&) const = default;
};

struct FeatureMatrix {
  FeatureSchema schema;
  std::vector<FeatureRow> rows;

  bool labeled() const {
    return !rows.empty() &&
           std::all_of(rows.begin(), rows.end(), [](const FeatureRow& r) { return r.label.has_value(); });
  }

  void validate() const {
    std::set<PairKey> seen;
    for (const auto& r : rows) {
      if (r.values.size() != schema.size())
        throw DataError("row (" + r.query_id + ", " + r.para_id + ") has " +
                        std::to_string(r.values.size()) + " values, schema has " +
                        std::to_string(schema.size()));
      if (!seen.insert({r.query_id, r.para_id}).second)
        throw IntegrityError("duplicate row (" + r.query_id + ", " + r.para_id + ")");
      for (double v : r.values)
        if (!std::isfinite(v))
          throw DataError("non-finite value in row (" + r.query_id + ", " + r.para_id + ")");
      if (r.label && *r.label != 0 && *r.label != 1)
        throw DataError("label must be 0 or 1 in row (" + r.query_id + ", " + r.para_id + ")");
    }
  }

  GoldSets gold() const {
    GoldSets g;
    for (const auto& r : rows) {
      auto& set = g[r.query_id];
      if (r.label && *r.label == 1) set.insert(r.para_id);
    }
    return g;
  }

  bool operator==(const FeatureMatrix&) const = default;
};

enum class MissingPolicy { error, fill_min };

/// One row per (query, candidate) in dataset order. Lengths are whitespace
/// token counts of the clean text. Under fill_min a missing external score
/// becomes that model's minimum observed score minus one.
inline FeatureMatrix assemble_features(const Dataset& d, const LexicalScores& lexical,
                                       const std::vector<ScoreFile>& score_files,
                                       const FeatureSchema& schema = {},
                                       MissingPolicy missing = MissingPolicy::error,
                                       bool with_labels = true, unsigned workers = 1) {
  struct Source {
    const ScoreFile* file = nullptr;
    double fill = 0.0;
  };
  std::vector<Source> sources(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& name = schema.names()[i];
    if (is_builtin_feature(name)) continue;
    for (const auto& sf : score_files) {
      if (sf.model_name != name) continue;
      if (sources[i].file) throw SchemaError("more than one score file for model '" + name + "'");
      sources[i].file = &sf;
    }
    if (!sources[i].file) throw SchemaError("no score file for feature '" + name + "'");
    const double m = sources[i].file->min_score();
    sources[i].fill = std::isfinite(m) ? m - 1.0 : -1.0;
  }

  std::vector<std::vector<FeatureRow>> per_query(d.instances.size());
  detail::parallel_for(d.instances.size(), workers, [&](std::size_t qi) {
    const auto& inst = d.instances[qi];
    const double qlen = static_cast<double>(detail::whitespace_token_count(inst.query_clean));
    for (const auto& p : inst.candidates) {
      PairKey key{inst.query_id, p.para_id};
      FeatureRow row{inst.query_id, p.para_id, std::nullopt, {}};
      if (with_labels) row.label = inst.gold.count(p.para_id) ? 1 : 0;
      const LexicalPairScores* lex = nullptr;
      for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& name = schema.names()[i];
        if (name == feature_names::query_length) {
          row.values.push_back(qlen);
        } else if (name == feature_names::candidate_length) {
          row.values.push_back(static_cast<double>(detail::whitespace_token_count(p.clean_text)));
        } else if (name == feature_names::bm25 || name == feature_names::qld) {
          if (!lex) {
            auto it = lexical.find(key);
            if (it == lexical.end())
              throw DataError("no lexical scores for (" + key.query_id + ", " + key.para_id + ")");
            lex = &it->second;
          }
          row.values.push_back(name == feature_names::bm25 ? lex->bm25 : lex->qld);
        } else {
          auto it = sources[i].file->entries.find(key);
          if (it != sources[i].file->entries.end()) {
            row.values.push_back(it->second);
          } else if (missing == MissingPolicy::fill_min) {
            row.values.push_back(sources[i].fill);
          } else {
            throw DataError("score file '" + name + "' lacks (" + key.query_id + ", " +
                            key.para_id + ")");
          }
        }
      }
      per_query[qi].push_back(std::move(row));
    }
  });

  FeatureMatrix m{schema, {}};
  for (auto& rows : per_query)
    for (auto& r : rows) m.rows.push_back(std::move(r));
  m.validate();
  return m;
}

/// Header "#schema: name1,name2,..." then
/// query_id \t para_id \t label-or-"-" \t v1 ... vn.
inline std::string format_matrix(const FeatureMatrix& m) {
  std::string out = "#schema: " + m.schema.joined() + '\n';
  for (const auto& r : m.rows) {
    out += r.query_id + '\t' + r.para_id + '\t' + (r.label ? std::to_string(*r.label) : "-");
    for (double v : r.values) out += '\t' + detail::format_double(v);
    out += '\n';
  }
  return out;
}

inline void write_matrix(const FeatureMatrix& m, const std::string& path) {
  detail::write_file(path, format_matrix(m));
}

inline FeatureMatrix parse_matrix(const std::string& content, const std::string& source,
                                  const std::optional<FeatureSchema>& expected = std::nullopt) {
  static constexpr std::string_view kHeader = "#schema: ";
  std::optional<FeatureMatrix> m;
  std::set<PairKey> seen;
  detail::for_each_line(content, [&](std::size_t ln, std::string_view line) {
    if (!m) {
      if (line.substr(0, kHeader.size()) != kHeader)
        throw ParseError(source, ln, "missing '#schema:' header");
      std::vector<std::string> names;
      for (auto n : detail::split(line.substr(kHeader.size()), ',')) names.emplace_back(n);
      FeatureSchema schema(std::move(names));
      if (expected && !(schema == *expected))
        throw SchemaError(source + ": schema '" + schema.joined() + "' does not match expected '" +
                          expected->joined() + "'");
      m = FeatureMatrix{std::move(schema), {}};
      return;
    }
    auto f = detail::split(line, '\t');
    if (f.size() != m->schema.size() + 3)
      throw ParseError(source, ln,
                       "expected " + std::to_string(m->schema.size() + 3) + " fields, got " +
                           std::to_string(f.size()));
    FeatureRow row{std::string(f[0]), std::string(f[1]), std::nullopt, {}};
    if (row.query_id.empty() || row.para_id.empty()) throw ParseError(source, ln, "empty id");
    if (f[2] == "1" || f[2] == "0")
      row.label = f[2] == "1" ? 1 : 0;
    else if (f[2] != "-")
      throw ParseError(source, ln, "label must be 0, 1 or '-'");
    for (std::size_t i = 3; i < f.size(); ++i) {
      auto v = detail::parse_finite_double(f[i]);
      if (!v) throw ParseError(source, ln, "invalid value '" + std::string(f[i]) + "'");
      row.values.push_back(*v);
    }
    if (!seen.insert({row.query_id, row.para_id}).second)
      throw ParseError(source, ln, "duplicate row (" + row.query_id + ", " + row.para_id + ")");
    m->rows.push_back(std::move(row));
  });
  if (!m) throw ParseError(source, 1, "empty matrix file");
  return std::move(*m);
}

inline FeatureMatrix read_matrix(const std::string& path,
                                 const std::optional<FeatureSchema>& expected = std::nullopt) {
  return parse_matrix(detail::read_file(path), path, expected);
}

}  // namespace entailrank
