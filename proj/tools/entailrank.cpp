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

// entailrank: command-line driver for the paragraph ranking pipeline.
//
// Exit status: 0 success, 1 usage or configuration error, 2 data integrity
// error, 3 runtime failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "entailrank/pipeline.hpp"

namespace er = entailrank;

namespace {

// Command-line overrides; anything set here wins over the config file.
struct Overrides {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;

  std::optional<std::string> train, valid, test, format, labels;
  std::optional<std::size_t> valid_size;
  std::vector<std::string> patterns;

  bool no_lowercase = false;
  bool no_stem = false;
  std::vector<std::string> stopwords;
  std::optional<double> k1, b, mu;
  std::optional<std::string> scope;

  std::optional<std::string> schema;
  std::vector<std::string> score_files;
  std::optional<std::string> missing_policy;

  std::optional<std::string> objective;
  std::optional<std::size_t> num_rounds, max_leaves, min_samples_leaf, patience, final_patience;
  std::optional<double> learning_rate, lambda, bagging_fraction;

  std::optional<std::string> policy;
  std::optional<std::size_t> k;
  std::optional<double> alpha;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON config file");
  sub->add_option("-o,--output-dir", o.output_dir, "Directory for artifacts and the manifest");
  sub->add_option("--seed", o.seed, "Seed for every stochastic stage");
  sub->add_option("--workers", o.workers, "Worker threads (default: $ENTAILRANK_WORKERS or 1)");
}

void add_data(CLI::App* sub, Overrides& o) {
  sub->add_option("--format", o.format, "Dataset format: jsonl | coliee");
  sub->add_option("--labels", o.labels, "Label file for the coliee format");
  sub->add_option("--placeholder", o.patterns, "Placeholder regex (repeatable, replaces default)");
}

void add_lexical(CLI::App* sub, Overrides& o) {
  sub->add_flag("--no-lowercase", o.no_lowercase, "Keep case when analyzing");
  sub->add_flag("--no-stem", o.no_stem, "Disable Porter stemming");
  sub->add_option("--stopword", o.stopwords, "Stopword (repeatable)");
  sub->add_option("--k1", o.k1, "BM25 k1");
  sub->add_option("--b", o.b, "BM25 b");
  sub->add_option("--mu", o.mu, "Dirichlet prior mu");
  sub->add_option("--scope", o.scope, "Collection statistics scope: per_query | global");
}

void add_features(CLI::App* sub, Overrides& o) {
  sub->add_option("--schema", o.schema, "Comma-separated feature names");
  sub->add_option("--score-file", o.score_files, "External scores as name=path (repeatable)");
  sub->add_option("--missing-policy", o.missing_policy, "error | fill_min");
}

void add_train(CLI::App* sub, Overrides& o) {
  sub->add_option("--objective", o.objective, "pointwise_logistic | lambdarank_at_1");
  sub->add_option("--num-rounds", o.num_rounds);
  sub->add_option("--learning-rate", o.learning_rate);
  sub->add_option("--max-leaves", o.max_leaves);
  sub->add_option("--min-samples-leaf", o.min_samples_leaf);
  sub->add_option("--patience", o.patience, "Early stopping patience in rounds");
  sub->add_option("--final-patience", o.final_patience, "Patience for the final retraining");
  sub->add_option("--lambda", o.lambda, "L2 regularization of leaf values");
  sub->add_option("--bagging-fraction", o.bagging_fraction);
}

void add_selection(CLI::App* sub, Overrides& o) {
  sub->add_option("--policy", o.policy, "top_k | threshold");
  sub->add_option("--k", o.k, "Cutoff for top_k");
  sub->add_option("--alpha", o.alpha, "Relative score threshold in (0, 1]");
}

template <typename T>
void apply(const std::optional<T>& v, T& out) {
  if (v) out = *v;
}

std::string absolute(const std::string& p) {
  return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
}

er::PipelineConfig resolve(const Overrides& o) {
  er::PipelineConfig c = o.config.empty() ? er::PipelineConfig{} : er::load_config(o.config);
  if (o.output_dir) c.output_dir = absolute(*o.output_dir);
  if (o.config.empty() && !o.output_dir) c.output_dir = absolute(c.output_dir);
  apply(o.seed, c.seed);
  apply(o.workers, c.workers);
  if (o.train) c.train.path = absolute(*o.train);
  if (o.valid) c.valid.path = absolute(*o.valid);
  if (o.test) c.test.path = absolute(*o.test);
  if (o.format) c.train.format = c.valid.format = c.test.format = *o.format;
  if (o.labels) c.train.labels = absolute(*o.labels);
  apply(o.valid_size, c.valid_size);
  if (!o.patterns.empty()) c.placeholder_patterns = o.patterns;
  if (o.no_lowercase) c.analyzer.lowercase = false;
  if (o.no_stem) c.analyzer.stemming = false;
  if (!o.stopwords.empty()) c.analyzer.stopwords = {o.stopwords.begin(), o.stopwords.end()};
  apply(o.k1, c.lexical.bm25.k1);
  apply(o.b, c.lexical.bm25.b);
  apply(o.mu, c.lexical.qld.mu);
  if (o.scope) c.scope = er::parse_scope(*o.scope);
  if (o.schema) {
    c.schema.clear();
    for (auto n : er::detail::split(*o.schema, ',')) c.schema.emplace_back(n);
  }
  for (const auto& spec : o.score_files) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw er::ConfigError("--score-file expects name=path, got '" + spec + "'");
    c.score_files[spec.substr(0, eq)] = absolute(spec.substr(eq + 1));
  }
  if (o.missing_policy) c.missing_policy = er::parse_missing_policy(*o.missing_policy);
  if (o.objective) c.train_cfg.objective = er::parse_objective(*o.objective);
  apply(o.num_rounds, c.train_cfg.num_rounds);
  apply(o.learning_rate, c.train_cfg.learning_rate);
  apply(o.max_leaves, c.train_cfg.max_leaves);
  apply(o.min_samples_leaf, c.train_cfg.min_samples_leaf);
  apply(o.patience, c.train_cfg.early_stop_patience);
  apply(o.final_patience, c.final_patience);
  apply(o.lambda, c.train_cfg.lambda);
  apply(o.bagging_fraction, c.train_cfg.bagging_fraction);
  if (o.policy) c.selection = er::parse_selection_policy(*o.policy);
  apply(o.k, c.k);
  apply(o.alpha, c.alpha);
  if (c.workers == 0) c.workers = 1;
  c.lexical.bm25.validate();
  c.lexical.qld.validate();
  er::effective_train_config(c).validate();
  return c;
}

// Output path: the explicit flag, else <output_dir>/<fallback>.
std::string out_path(const std::string& flag, const er::PipelineConfig& c,
                     const std::string& fallback) {
  return flag.empty() ? (std::filesystem::path(c.output_dir) / fallback).string() : absolute(flag);
}

er::Dataset input_dataset(const std::string& input, const er::PipelineConfig& c) {
  er::DatasetSource src = c.train;
  if (!input.empty()) src.path = absolute(input);
  if (src.path.empty()) throw er::ConfigError("no input dataset (use --input or data.train)");
  std::error_code ec;
  if (!std::filesystem::exists(src.path, ec)) throw er::ConfigError("input not found: " + src.path);
  return er::load_dataset(src, c);
}

void require_exists(const std::string& path, const char* what) {
  std::error_code ec;
  if (path.empty() || !std::filesystem::exists(path, ec))
    throw er::ConfigError(std::string(what) + " not found: " + path);
}

void warn_excluded(const er::EvalReport& report) {
  for (const auto& q : report.excluded_queries)
    std::cerr << "warning: query '" << q << "' has no gold labels; excluded\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Legal case entailment paragraph ranking: lexical scoring, feature assembly, "
               "gradient-boosted learning to rank and P/R/F1 evaluation"};
  app.require_subcommand(1);
  Overrides o;

  std::string input, out, out2, json_out, matrix, train_matrix, valid_matrix, model_path,
      run_path, selection_path, scorer = "bm25", dump_path;
  std::optional<std::size_t> split_n;

  auto* ingest = app.add_subcommand("ingest", "Read a dataset and write canonical JSONL");
  add_common(ingest, o);
  add_data(ingest, o);
  ingest->add_option("-i,--input", input, "Dataset (JSONL file or coliee directory)");
  ingest->add_option("--out", out, "Output JSONL (default <output-dir>/dataset.jsonl)");

  auto* stats = app.add_subcommand("stats", "Print dataset statistics");
  add_common(stats, o);
  add_data(stats, o);
  stats->add_option("-i,--input", input, "Dataset");
  stats->add_option("--json", json_out, "Also write the statistics as JSON");

  auto* split = app.add_subcommand("split", "Seeded train/validation split");
  add_common(split, o);
  add_data(split, o);
  split->add_option("-i,--input", input, "Dataset");
  split->add_option("-n,--n", split_n, "Validation size (default data.valid_size)");
  split->add_option("--out-train", out, "default <output-dir>/train.jsonl");
  split->add_option("--out-valid", out2, "default <output-dir>/valid.jsonl");

  auto* rank = app.add_subcommand("rank-lexical", "Rank candidates with BM25 or QLD");
  add_common(rank, o);
  add_data(rank, o);
  add_lexical(rank, o);
  rank->add_option("-i,--input", input, "Dataset");
  rank->add_option("--scorer", scorer, "bm25 | qld")->check(CLI::IsMember({"bm25", "qld"}));
  rank->add_option("--out", out, "Run file (default <output-dir>/run_<scorer>.tsv)");
  rank->add_option("--dump", dump_path, "Also write the score dump (both scorers)");

  auto* features = app.add_subcommand("features", "Assemble the feature matrix");
  add_common(features, o);
  add_data(features, o);
  add_lexical(features, o);
  add_features(features, o);
  features->add_option("-i,--input", input, "Dataset");
  features->add_option("--out", out, "Matrix TSV (default <output-dir>/features.tsv)");

  auto* train = app.add_subcommand("train", "Train the learning-to-rank model");
  add_common(train, o);
  add_train(train, o);
  train->add_option("--train-matrix", train_matrix, "Training matrix")->required();
  train->add_option("--valid-matrix", valid_matrix, "Validation matrix")->required();
  train->add_option("--model-out", out, "default <output-dir>/model.json");
  train->add_option("--history-out", out2, "default <output-dir>/history.tsv");

  auto* predict = app.add_subcommand("predict", "Score a matrix with a trained model");
  add_common(predict, o);
  predict->add_option("--model", model_path, "Model JSON")->required();
  predict->add_option("--matrix", matrix, "Feature matrix")->required();
  predict->add_option("--out", out, "Run file (default <output-dir>/run.tsv)");

  auto* select = app.add_subcommand("select", "Turn a run into answer selections");
  add_common(select, o);
  add_selection(select, o);
  select->add_option("--run", run_path, "Run file")->required();
  select->add_option("--out", out, "Selection file (default <output-dir>/selection.tsv)");

  auto* evaluate = app.add_subcommand("evaluate", "Micro-averaged precision, recall and F1");
  add_common(evaluate, o);
  add_data(evaluate, o);
  evaluate->add_option("--selection", selection_path, "Selection file")->required();
  evaluate->add_option("-i,--input", input, "Dataset holding the gold labels");
  evaluate->add_option("--json", json_out, "Report JSON (default <output-dir>/report.json)");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
  add_common(pipeline, o);
  add_data(pipeline, o);
  add_lexical(pipeline, o);
  add_features(pipeline, o);
  add_train(pipeline, o);
  add_selection(pipeline, o);
  pipeline->add_option("--train", o.train, "Training dataset");
  pipeline->add_option("--valid", o.valid, "Validation dataset (default: split off train)");
  pipeline->add_option("--test", o.test, "Test dataset");
  pipeline->add_option("--valid-size", o.valid_size, "Validation size when splitting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const er::PipelineConfig c = resolve(o);

    if (*ingest) {
      er::ArtifactWriter w(c.output_dir);
      auto d = input_dataset(input, c);
      w.write(out_path(out, c, "dataset.jsonl"), er::to_jsonl(d));
      w.write_manifest(c, "ingest", "manifest_ingest.json");
    } else if (*stats) {
      auto d = input_dataset(input, c);
      auto s = er::dataset_stats(d);
      std::cout << er::stats_table(s);
      if (!json_out.empty()) er::detail::write_file(absolute(json_out), er::stats_to_json(s).dump(2) + '\n');
    } else if (*split) {
      auto d = input_dataset(input, c);
      auto [tr, va] = er::split_validation(d, split_n.value_or(c.valid_size), c.seed);
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(out, c, "train.jsonl"), er::to_jsonl(tr));
      w.write(out_path(out2, c, "valid.jsonl"), er::to_jsonl(va));
      w.write_manifest(c, "split", "manifest_split.json");
    } else if (*rank) {
      auto d = input_dataset(input, c);
      const auto s = scorer == "bm25" ? er::LexicalScorer::bm25 : er::LexicalScorer::qld;
      auto lex = er::compute_lexical_scores(d, c.analyzer, c.lexical, c.scope, c.workers);
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(out, c, "run_" + scorer + ".tsv"), er::format_run(er::lexical_run(lex, s)));
      if (!dump_path.empty()) w.write(absolute(dump_path), er::format_lexical_dump(lex));
      w.write_manifest(c, "rank-lexical", "manifest_rank-lexical.json");
    } else if (*features) {
      for (const auto& [name, path] : c.score_files) require_exists(path, "score file");
      auto d = input_dataset(input, c);
      auto m = er::build_features(d, er::load_score_files(c), c);
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(out, c, "features.tsv"), er::format_matrix(m));
      w.write_manifest(c, "features", "manifest_features.json");
    } else if (*train) {
      require_exists(absolute(train_matrix), "train matrix");
      require_exists(absolute(valid_matrix), "valid matrix");
      auto tm = er::read_matrix(absolute(train_matrix));
      auto vm = er::read_matrix(absolute(valid_matrix));
      auto [model, history] = er::train_gbdt(tm, vm, er::effective_train_config(c));
      for (const auto& warning : history.warnings) std::cerr << "warning: " << warning << '\n';
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(out, c, "model.json"), er::model_to_json(model));
      w.write(out_path(out2, c, "history.tsv"), er::format_history(history));
      w.write_manifest(c, "train", "manifest_train.json");
      std::cout << "rounds " << history.rounds.size() << ", best_iteration "
                << history.best_iteration << '\n';
    } else if (*predict) {
      require_exists(absolute(model_path), "model");
      require_exists(absolute(matrix), "matrix");
      auto model = er::load_model(absolute(model_path));
      auto m = er::read_matrix(absolute(matrix));
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(out, c, "run.tsv"), er::format_run(er::predict(model, m)));
      w.write_manifest(c, "predict", "manifest_predict.json");
    } else if (*select) {
      require_exists(absolute(run_path), "run file");
      auto run = er::read_run_file(absolute(run_path));
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(out, c, "selection.tsv"), er::format_selection(er::apply_selection(run, c)));
      w.write_manifest(c, "select", "manifest_select.json");
    } else if (*evaluate) {
      require_exists(absolute(selection_path), "selection file");
      auto sel = er::read_selection_file(absolute(selection_path));
      auto d = input_dataset(input, c);
      auto report = er::evaluate(sel, er::gold_map(d));
      warn_excluded(report);
      er::ArtifactWriter w(c.output_dir);
      w.write(out_path(json_out, c, "report.json"), er::report_to_json(report).dump(2) + '\n');
      w.write_manifest(c, "evaluate", "manifest_evaluate.json");
      std::cout << er::report_table(report);
    } else if (*pipeline) {
      auto result = er::run_pipeline(c);
      for (const auto& warning : result.history.warnings) std::cerr << "warning: " << warning << '\n';
      for (const auto* r : {&result.valid_report, result.test_report ? &*result.test_report : nullptr})
        if (r) warn_excluded(*r);
      std::cout << "validation\n" << er::report_table(result.valid_report);
      if (result.test_report) std::cout << "test\n" << er::report_table(*result.test_report);
    }
    return 0;
  } catch (const er::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const er::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
