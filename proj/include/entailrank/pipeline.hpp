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

// Pipeline configuration and the stages the command-line tool chains
// together: ingest, statistics, lexical scoring, feature assembly, training,
// prediction, selection and evaluation.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entailrank/analyzer.hpp"
#include "entailrank/corpus.hpp"
#include "entailrank/detail/numeric.hpp"
#include "entailrank/detail/parallel.hpp"
#include "entailrank/detail/text.hpp"
#include "entailrank/error.hpp"
#include "entailrank/eval.hpp"
#include "entailrank/features.hpp"
#include "entailrank/gbdt.hpp"
#include "entailrank/lexical.hpp"
#include "entailrank/run.hpp"

namespace entailrank {

inline constexpr const char* kVersion = "0.1.0";

struct DatasetSource {
  std::string path;
  std::string format = "jsonl";  // jsonl | coliee
  std::string labels;            // coliee only; empty = unlabeled
};

enum class SelectionPolicy { top_k, threshold };

struct PipelineConfig {
  DatasetSource train;
  DatasetSource valid;  // empty path: split valid_size queries off train
  DatasetSource test;   // optional
  std::size_t valid_size = 100;
  std::vector<std::string> placeholder_patterns{PlaceholderFilter::kDefaultPattern};
  ColieeLayout layout;

  AnalyzerConfig analyzer;
  LexicalParams lexical;
  CollectionScope scope = CollectionScope::per_query;

  std::vector<std::string> schema = FeatureSchema::default_names();
  std::map<std::string, std::string> score_files;  // model name -> TSV path
  MissingPolicy missing_policy = MissingPolicy::error;

  TrainConfig train_cfg;
  std::size_t final_patience = 10;

  SelectionPolicy selection = SelectionPolicy::top_k;
  std::size_t k = 1;
  double alpha = 0.9;

  std::string output_dir = "out";
  std::uint64_t seed = 42;
  unsigned workers = detail::default_workers();
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
void read_opt(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for '" + where + "." + key + "'");
  }
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path.lexically_normal().string();
  return (base / path).lexically_normal().string();
}

inline DatasetSource read_source(const nlohmann::json& j, const std::string& where,
                                 const std::filesystem::path& base) {
  DatasetSource s;
  if (j.is_string()) {
    s.path = resolve_path(j.get<std::string>(), base);
    return s;
  }
  reject_unknown(j, {"path", "format", "labels"}, where);
  read_opt(j, "path", s.path, where);
  read_opt(j, "format", s.format, where);
  read_opt(j, "labels", s.labels, where);
  if (s.format != "jsonl" && s.format != "coliee")
    throw ConfigError(where + ".format must be 'jsonl' or 'coliee'");
  s.path = resolve_path(s.path, base);
  s.labels = resolve_path(s.labels, base);
  return s;
}

inline nlohmann::ordered_json source_to_json(const DatasetSource& s) {
  return {{"path", s.path}, {"format", s.format}, {"labels", s.labels}};
}

}  // namespace detail

inline CollectionScope parse_scope(const std::string& s) {
  if (s == "per_query") return CollectionScope::per_query;
  if (s == "global") return CollectionScope::global;
  throw ConfigError("scope must be 'per_query' or 'global'");
}

inline MissingPolicy parse_missing_policy(const std::string& s) {
  if (s == "error") return MissingPolicy::error;
  if (s == "fill_min") return MissingPolicy::fill_min;
  throw ConfigError("missing_policy must be 'error' or 'fill_min'");
}

inline SelectionPolicy parse_selection_policy(const std::string& s) {
  if (s == "top_k") return SelectionPolicy::top_k;
  if (s == "threshold") return SelectionPolicy::threshold;
  throw ConfigError("selection policy must be 'top_k' or 'threshold'");
}

/// Reads a JSON config. Relative paths are resolved against `base_dir`
/// (normally the config file's directory). Unknown keys are rejected.
inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir = {}) {
  using detail::read_opt;
  PipelineConfig c;
  detail::reject_unknown(j, {"data", "analyzer", "lexical", "features", "train", "selection",
                             "output_dir", "seed", "workers"},
                         "config");
  if (auto d = j.find("data"); d != j.end()) {
    detail::reject_unknown(*d, {"train", "valid", "test", "valid_size", "placeholder_patterns",
                                "coliee_query_file", "coliee_paragraph_dir"},
                           "data");
    if (d->contains("train")) c.train = detail::read_source((*d)["train"], "data.train", base_dir);
    if (d->contains("valid")) c.valid = detail::read_source((*d)["valid"], "data.valid", base_dir);
    if (d->contains("test")) c.test = detail::read_source((*d)["test"], "data.test", base_dir);
    read_opt(*d, "valid_size", c.valid_size, "data");
    read_opt(*d, "placeholder_patterns", c.placeholder_patterns, "data");
    read_opt(*d, "coliee_query_file", c.layout.query_file, "data");
    read_opt(*d, "coliee_paragraph_dir", c.layout.paragraph_dir, "data");
  }
  if (auto a = j.find("analyzer"); a != j.end()) {
    detail::reject_unknown(*a, {"lowercase", "stemming", "stopwords"}, "analyzer");
    read_opt(*a, "lowercase", c.analyzer.lowercase, "analyzer");
    read_opt(*a, "stemming", c.analyzer.stemming, "analyzer");
    read_opt(*a, "stopwords", c.analyzer.stopwords, "analyzer");
  }
  if (auto l = j.find("lexical"); l != j.end()) {
    detail::reject_unknown(*l, {"k1", "b", "mu", "scope"}, "lexical");
    read_opt(*l, "k1", c.lexical.bm25.k1, "lexical");
    read_opt(*l, "b", c.lexical.bm25.b, "lexical");
    read_opt(*l, "mu", c.lexical.qld.mu, "lexical");
    std::string scope = "per_query";
    read_opt(*l, "scope", scope, "lexical");
    c.scope = parse_scope(scope);
  }
  if (auto f = j.find("features"); f != j.end()) {
    detail::reject_unknown(*f, {"schema", "score_files", "missing_policy"}, "features");
    read_opt(*f, "schema", c.schema, "features");
    read_opt(*f, "score_files", c.score_files, "features");
    for (auto& [name, path] : c.score_files) path = detail::resolve_path(path, base_dir);
    std::string policy = "error";
    read_opt(*f, "missing_policy", policy, "features");
    c.missing_policy = parse_missing_policy(policy);
  }
  if (auto t = j.find("train"); t != j.end()) {
    detail::reject_unknown(*t, {"objective", "num_rounds", "learning_rate", "max_leaves",
                                "min_samples_leaf", "early_stop_patience", "lambda",
                                "min_split_gain", "bagging_fraction", "final_patience"},
                           "train");
    std::string obj = objective_name(c.train_cfg.objective);
    read_opt(*t, "objective", obj, "train");
    c.train_cfg.objective = parse_objective(obj);
    read_opt(*t, "num_rounds", c.train_cfg.num_rounds, "train");
    read_opt(*t, "learning_rate", c.train_cfg.learning_rate, "train");
    read_opt(*t, "max_leaves", c.train_cfg.max_leaves, "train");
    read_opt(*t, "min_samples_leaf", c.train_cfg.min_samples_leaf, "train");
    read_opt(*t, "early_stop_patience", c.train_cfg.early_stop_patience, "train");
    read_opt(*t, "lambda", c.train_cfg.lambda, "train");
    read_opt(*t, "min_split_gain", c.train_cfg.min_split_gain, "train");
    read_opt(*t, "bagging_fraction", c.train_cfg.bagging_fraction, "train");
    read_opt(*t, "final_patience", c.final_patience, "train");
  }
  if (auto s = j.find("selection"); s != j.end()) {
    detail::reject_unknown(*s, {"policy", "k", "alpha"}, "selection");
    std::string policy = "top_k";
    read_opt(*s, "policy", policy, "selection");
    c.selection = parse_selection_policy(policy);
    read_opt(*s, "k", c.k, "selection");
    read_opt(*s, "alpha", c.alpha, "selection");
  }
  read_opt(j, "output_dir", c.output_dir, "config");
  c.output_dir = detail::resolve_path(c.output_dir, base_dir);
  read_opt(j, "seed", c.seed, "config");
  read_opt(j, "workers", c.workers, "config");
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return pipeline_config_from_json(j, std::filesystem::absolute(path).parent_path());
}

/// Canonical form of every setting that influences results. The output
/// directory and worker count are left out: neither changes any artifact.
inline nlohmann::ordered_json pipeline_config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["data"] = {{"train", detail::source_to_json(c.train)},
               {"valid", detail::source_to_json(c.valid)},
               {"test", detail::source_to_json(c.test)},
               {"valid_size", c.valid_size},
               {"placeholder_patterns", c.placeholder_patterns},
               {"coliee_query_file", c.layout.query_file},
               {"coliee_paragraph_dir", c.layout.paragraph_dir}};
  j["analyzer"] = {{"lowercase", c.analyzer.lowercase},
                   {"stemming", c.analyzer.stemming},
                   {"stopwords", c.analyzer.stopwords}};
  j["lexical"] = {{"k1", c.lexical.bm25.k1},
                  {"b", c.lexical.bm25.b},
                  {"mu", c.lexical.qld.mu},
                  {"scope", c.scope == CollectionScope::per_query ? "per_query" : "global"}};
  j["features"] = {{"schema", c.schema},
                   {"score_files", c.score_files},
                   {"missing_policy", c.missing_policy == MissingPolicy::error ? "error" : "fill_min"}};
  auto train = config_to_json(c.train_cfg);
  train.erase("seed");
  train["final_patience"] = c.final_patience;
  j["train"] = std::move(train);
  j["selection"] = {{"policy", c.selection == SelectionPolicy::top_k ? "top_k" : "threshold"},
                    {"k", c.k},
                    {"alpha", c.alpha}};
  j["seed"] = c.seed;
  return j;
}

inline std::string config_hash(const PipelineConfig& c) {
  return detail::to_hex(detail::fnv1a64(pipeline_config_to_json(c).dump()));
}

/// The training config with the pipeline seed applied.
inline TrainConfig effective_train_config(const PipelineConfig& c) {
  TrainConfig t = c.train_cfg;
  t.seed = c.seed;
  return t;
}

inline Dataset load_dataset(const DatasetSource& src, const PipelineConfig& c) {
  if (src.path.empty()) throw ConfigError("dataset path is not set");
  const PlaceholderFilter filter(c.placeholder_patterns);
  if (src.format == "coliee") return ingest_coliee_dir(src.path, src.labels, c.layout, filter);
  if (src.format != "jsonl") throw ConfigError("unknown dataset format '" + src.format + "'");
  return ingest_jsonl(src.path, filter);
}

inline nlohmann::ordered_json stats_to_json(const StatsReport& s) {
  nlohmann::ordered_json j;
  j["num_queries"] = s.num_queries;
  j["avg_candidates_per_query"] = s.avg_candidates_per_query;
  j["avg_positives_per_query"] = s.avg_positives_per_query;
  j["avg_query_length"] = s.avg_query_length;
  j["avg_candidate_length"] = s.avg_candidate_length;
  return j;
}

inline std::string stats_table(const StatsReport& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "# of query cases                      %zu\n"
                "Avg. # of candidates per query        %.2f\n"
                "Avg. # positive candidates per query  %.2f\n"
                "Avg. query length                     %.2f\n"
                "Avg. candidate length                 %.2f\n",
                s.num_queries, s.avg_candidates_per_query, s.avg_positives_per_query,
                s.avg_query_length, s.avg_candidate_length);
  return buf;
}

inline std::vector<ScoreFile> load_score_files(const PipelineConfig& c) {
  std::vector<ScoreFile> out;
  for (const auto& [name, path] : c.score_files) out.push_back(load_score_file(path, name));
  return out;
}

/// Dataset with no gold at all is treated as unlabeled (test mode).
inline bool has_labels(const Dataset& d) {
  for (const auto& q : d.instances)
    if (!q.gold.empty()) return true;
  return false;
}

inline FeatureMatrix build_features(const Dataset& d, const std::vector<ScoreFile>& score_files,
                                    const PipelineConfig& c) {
  const auto lex = compute_lexical_scores(d, c.analyzer, c.lexical, c.scope, c.workers);
  return assemble_features(d, lex, score_files, FeatureSchema(c.schema), c.missing_policy,
                           has_labels(d), c.workers);
}

inline Selection apply_selection(const RankedRun& run, const PipelineConfig& c) {
  return c.selection == SelectionPolicy::top_k ? select_top_k(run, c.k)
                                               : select_threshold(run, c.alpha);
}

/// Writes the artifact and records its content hash for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  }

  std::string write(const std::string& name, const std::string& content) {
    auto path = (dir_ / name).string();
    detail::write_file(path, content);
    hashes_[name] = detail::to_hex(detail::fnv1a64(content));
    return path;
  }

  const std::filesystem::path& dir() const { return dir_; }

  /// manifest.json: versions, config hash and artifact hashes. Only the
  /// "created" field varies between identical runs.
  void write_manifest(const PipelineConfig& c, const std::string& command,
                      const std::string& filename = "manifest.json") {
    nlohmann::ordered_json m;
    m["tool"] = "entailrank";
    m["version"] = kVersion;
    m["model_format_version"] = 1;
    m["command"] = command;
    m["config_hash"] = config_hash(c);
    m["config"] = pipeline_config_to_json(c);
    m["artifacts"] = hashes_;
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    m["created"] = buf;
    detail::write_file((dir_ / filename).string(), m.dump(2) + '\n');
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> hashes_;
};

/// Every input the pipeline reads must exist before any work starts.
inline void check_inputs_exist(const PipelineConfig& c) {
  namespace fs = std::filesystem;
  auto need = [](const std::string& path, const std::string& what) {
    std::error_code ec;
    if (!fs::exists(path, ec)) throw ConfigError(what + " not found: " + path);
  };
  if (c.train.path.empty()) throw ConfigError("data.train is not set");
  need(c.train.path, "train dataset");
  if (!c.train.labels.empty()) need(c.train.labels, "train labels");
  for (const auto* src : {&c.valid, &c.test}) {
    if (src->path.empty()) continue;
    need(src->path, "dataset");
    if (!src->labels.empty()) need(src->labels, "labels");
  }
  for (const auto& [name, path] : c.score_files) need(path, "score file for '" + name + "'");
}

struct PipelineResult {
  EvalReport valid_report;
  std::optional<EvalReport> test_report;
  TrainHistory history;
};

/// Full chain. Artifacts (all under c.output_dir):
///   train.jsonl valid.jsonl [test.jsonl] stats.json
///   lexical_{split}.tsv features_{split}.tsv
///   model.json history.tsv run_valid.tsv selection_valid.tsv report.json report.txt
///   with a test set: model_final.json history_final.tsv run_test.tsv
///   selection_test.tsv [report_test.json]
///   manifest.json
inline PipelineResult run_pipeline(const PipelineConfig& c) {
  check_inputs_exist(c);
  Dataset train = load_dataset(c.train, c);
  Dataset valid;
  if (c.valid.path.empty()) {
    auto [tr, va] = split_validation(train, c.valid_size, c.seed);
    train = std::move(tr);
    valid = std::move(va);
  } else {
    valid = load_dataset(c.valid, c);
  }
  std::optional<Dataset> test;
  if (!c.test.path.empty()) test = load_dataset(c.test, c);
  const auto score_files = load_score_files(c);

  ArtifactWriter out(c.output_dir);
  out.write("train.jsonl", to_jsonl(train));
  out.write("valid.jsonl", to_jsonl(valid));
  if (test) out.write("test.jsonl", to_jsonl(*test));

  nlohmann::ordered_json stats;
  stats["train"] = stats_to_json(dataset_stats(train));
  stats["valid"] = stats_to_json(dataset_stats(valid));
  if (test) stats["test"] = stats_to_json(dataset_stats(*test));
  out.write("stats.json", stats.dump(2) + '\n');

  auto featurize = [&](const Dataset& d, const std::string& split) {
    const auto lex = compute_lexical_scores(d, c.analyzer, c.lexical, c.scope, c.workers);
    out.write("lexical_" + split + ".tsv", format_lexical_dump(lex));
    auto m = assemble_features(d, lex, score_files, FeatureSchema(c.schema), c.missing_policy,
                               has_labels(d), c.workers);
    out.write("features_" + split + ".tsv", format_matrix(m));
    return m;
  };
  const FeatureMatrix train_m = featurize(train, "train");
  const FeatureMatrix valid_m = featurize(valid, "valid");

  PipelineResult result;
  const TrainConfig tcfg = effective_train_config(c);
  auto [model, history] = train_gbdt(train_m, valid_m, tcfg);
  out.write("model.json", model_to_json(model));
  out.write("history.tsv", format_history(history));
  const RankedRun run = predict(model, valid_m);
  out.write("run_valid.tsv", format_run(run));
  const Selection sel = apply_selection(run, c);
  out.write("selection_valid.tsv", format_selection(sel));
  result.valid_report = evaluate(sel, gold_map(valid));
  out.write("report.json", report_to_json(result.valid_report).dump(2) + '\n');
  out.write("report.txt", report_table(result.valid_report));
  result.history = std::move(history);

  if (test) {
    const FeatureMatrix test_m = featurize(*test, "test");
    TrainConfig final_cfg = tcfg;
    final_cfg.early_stop_patience = std::min(c.final_patience, final_cfg.num_rounds);
    TrainHistory final_history;
    auto [final_model, test_run] =
        retrain_final(merge_matrices(train_m, valid_m), test_m, final_cfg, &final_history);
    out.write("model_final.json", model_to_json(final_model));
    out.write("history_final.tsv", format_history(final_history));
    out.write("run_test.tsv", format_run(test_run));
    const Selection test_sel = apply_selection(test_run, c);
    out.write("selection_test.tsv", format_selection(test_sel));
    if (has_labels(*test)) {
      result.test_report = evaluate(test_sel, gold_map(*test));
      out.write("report_test.json", report_to_json(*result.test_report).dump(2) + '\n');
    }
  }
  out.write_manifest(c, "pipeline");
  return result;
}

}  // namespace entailrank
