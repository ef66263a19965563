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

// Gradient-boosted regression trees for learning to rank.
//
// Trees grow best-first (the leaf with the largest split gain is expanded
// next) up to max_leaves, using exact greedy splits over every distinct
// feature value. Leaf values are Newton steps -G / (H + lambda). After every
// round the validation NDCG@1 is recorded; training stops once it has not
// improved for early_stop_patience rounds and the model is truncated at the
// best round.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entailrank/detail/numeric.hpp"
#include "entailrank/detail/text.hpp"
#include "entailrank/error.hpp"
#include "entailrank/eval.hpp"
#include "entailrank/features.hpp"
#include "entailrank/run.hpp"

namespace entailrank {

enum class Objective { pointwise_logistic, lambdarank_at_1 };

inline const char* objective_name(Objective o) {
  return o == Objective::pointwise_logistic ? "pointwise_logistic" : "lambdarank_at_1";
}

inline Objective parse_objective(const std::string& s) {
  if (s == "pointwise_logistic") return Objective::pointwise_logistic;
  if (s == "lambdarank_at_1") return Objective::lambdarank_at_1;
  throw ConfigError("unknown objective '" + s + "'");
}

struct TrainConfig {
  Objective objective = Objective::pointwise_logistic;
  std::size_t num_rounds = 500;
  double learning_rate = 0.1;
  std::size_t max_leaves = 31;
  std::size_t min_samples_leaf = 5;
  std::size_t early_stop_patience = 50;
  double lambda = 1.0;
  double min_split_gain = 0.0;
  // Fraction of training rows sampled (with the seeded generator) per round.
  double bagging_fraction = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_rounds == 0) throw ConfigError("num_rounds must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw ConfigError("learning_rate must lie in (0, 1]");
    if (max_leaves < 2) throw ConfigError("max_leaves must be >= 2");
    if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
    if (early_stop_patience < 1 || early_stop_patience > num_rounds)
      throw ConfigError("early_stop_patience must lie in [1, num_rounds]");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
    if (!(min_split_gain >= 0.0)) throw ConfigError("min_split_gain must be >= 0");
    if (!(bagging_fraction > 0.0 && bagging_fraction <= 1.0))
      throw ConfigError("bagging_fraction must lie in (0, 1]");
  }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool default_left = true;  // direction for NaN inputs
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  // Values at or below the threshold go left.
  double predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      const double v = x[static_cast<std::size_t>(n.feature)];
      const bool left = std::isnan(v) ? n.default_left : v <= n.threshold;
      i = static_cast<std::size_t>(left ? n.left : n.right);
    }
    return nodes[i].value;
  }

  std::size_t num_leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  bool operator==(const RegressionTree&) const = default;
};

struct GbdtModel {
  std::vector<RegressionTree> trees;
  double base_score = 0.0;
  double learning_rate = 0.1;
  FeatureSchema schema;
  std::string schema_fingerprint = FeatureSchema().fingerprint();
  std::size_t best_iteration = 0;
  TrainConfig config;

  /// base_score + learning_rate * (sum of leaf values of the first
  /// best_iteration trees, added in tree order).
  double predict_row(std::span<const double> x) const {
    double sum = 0.0;
    const std::size_t n = std::min(best_iteration, trees.size());
    for (std::size_t t = 0; t < n; ++t) sum += trees[t].predict(x);
    return base_score + learning_rate * sum;
  }
};

struct RoundRecord {
  double train_loss = 0.0;
  double valid_ndcg_at_1 = 0.0;
};

struct TrainHistory {
  std::vector<RoundRecord> rounds;
  std::size_t best_iteration = 0;
  std::vector<std::string> warnings;
};

/// Orders rows into a run: per query descending score, ties by para_id.
inline RankedRun rank_rows(const FeatureMatrix& m, std::span<const double> scores) {
  RankedRun run;
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    run[m.rows[i].query_id].push_back({m.rows[i].para_id, scores[i]});
  for (auto& [qid, entry] : run) sort_ranked(entry);
  return run;
}

inline void check_schema(const GbdtModel& model, const FeatureMatrix& m) {
  if (m.schema.fingerprint() != model.schema_fingerprint)
    throw SchemaError("matrix schema '" + m.schema.joined() + "' does not match the model's (" +
                      model.schema.joined() + ")");
}

inline std::vector<double> predict_scores(const GbdtModel& model, const FeatureMatrix& m) {
  check_schema(model, m);
  std::vector<double> out(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) out[i] = model.predict_row(m.rows[i].values);
  return out;
}

inline RankedRun predict(const GbdtModel& model, const FeatureMatrix& m) {
  const auto scores = predict_scores(model, m);
  return rank_rows(m, scores);
}

namespace detail {

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Row indices grouped by query, each group in ascending para_id order.
inline std::vector<std::vector<std::size_t>> query_groups(const FeatureMatrix& m) {
  std::map<std::string, std::vector<std::size_t>> by_q;
  for (std::size_t i = 0; i < m.rows.size(); ++i) by_q[m.rows[i].query_id].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [q, rows] : by_q) {
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return m.rows[a].para_id < m.rows[b].para_id; });
    out.push_back(std::move(rows));
  }
  return out;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& columns,
              const std::vector<std::vector<std::uint32_t>>& presorted, const TrainConfig& cfg)
      : cols_(columns), presorted_(presorted), cfg_(cfg) {}

  RegressionTree build(const std::vector<double>& grad, const std::vector<double>& hess,
                       const std::vector<char>& in_bag) {
    grad_ = &grad;
    hess_ = &hess;
    RegressionTree tree;
    tree.nodes.push_back({});
    std::vector<Leaf> leaves;

    Leaf root;
    root.node = 0;
    root.sorted.resize(cols_.size());
    for (std::size_t f = 0; f < cols_.size(); ++f)
      for (auto r : presorted_[f])
        if (in_bag[r]) root.sorted[f].push_back(r);
    for (std::uint32_t r = 0; r < in_bag.size(); ++r)
      if (in_bag[r]) root.rows.push_back(r);
    finish_leaf(root);
    leaves.push_back(std::move(root));

    while (leaves.size() < cfg_.max_leaves) {
      std::size_t pick = leaves.size();
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i].split_feature < 0) continue;
        if (pick == leaves.size() || leaves[i].gain > leaves[pick].gain) pick = i;
      }
      if (pick == leaves.size()) break;

      auto [left, right] = split(leaves[pick]);
      auto& parent = tree.nodes[static_cast<std::size_t>(leaves[pick].node)];
      parent.feature = leaves[pick].split_feature;
      parent.threshold = leaves[pick].threshold;
      parent.default_left = true;
      parent.left = static_cast<int>(tree.nodes.size());
      parent.right = parent.left + 1;
      left.node = parent.left;
      right.node = parent.right;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      finish_leaf(left);
      finish_leaf(right);
      leaves[pick] = std::move(left);
      leaves.push_back(std::move(right));
    }

    for (const auto& leaf : leaves)
      tree.nodes[static_cast<std::size_t>(leaf.node)].value =
          -leaf.g_sum / (leaf.h_sum + cfg_.lambda);
    return tree;
  }

 private:
  struct Leaf {
    int node = -1;
    std::vector<std::uint32_t> rows;                 // ascending row index
    std::vector<std::vector<std::uint32_t>> sorted;  // per feature, by value then row
    double g_sum = 0.0;
    double h_sum = 0.0;
    int split_feature = -1;
    std::size_t split_pos = 0;  // last position (in sorted[split_feature]) going left
    double threshold = 0.0;
    double gain = 0.0;
  };

  double score(double g, double h) const { return g * g / (h + cfg_.lambda); }

  void finish_leaf(Leaf& leaf) const {
    const auto& g = *grad_;
    const auto& h = *hess_;
    leaf.g_sum = 0.0;
    leaf.h_sum = 0.0;
    for (auto r : leaf.rows) {
      leaf.g_sum += g[r];
      leaf.h_sum += h[r];
    }
    leaf.split_feature = -1;
    leaf.gain = 0.0;
    const std::size_t n = leaf.rows.size();
    if (n < 2 * cfg_.min_samples_leaf) return;
    const double parent = score(leaf.g_sum, leaf.h_sum);
    for (std::size_t f = 0; f < cols_.size(); ++f) {
      const auto& order = leaf.sorted[f];
      const auto& x = cols_[f];
      double gl = 0.0, hl = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        gl += g[order[i]];
        hl += h[order[i]];
        const std::size_t cnt = i + 1;
        if (x[order[i]] == x[order[i + 1]]) continue;
        if (cnt < cfg_.min_samples_leaf || n - cnt < cfg_.min_samples_leaf) continue;
        const double gain =
            score(gl, hl) + score(leaf.g_sum - gl, leaf.h_sum - hl) - parent;
        if (gain > cfg_.min_split_gain && gain > leaf.gain) {
          leaf.gain = gain;
          leaf.split_feature = static_cast<int>(f);
          leaf.split_pos = i;
          leaf.threshold = x[order[i]];
        }
      }
    }
  }

  std::pair<Leaf, Leaf> split(const Leaf& leaf) {
    const auto f = static_cast<std::size_t>(leaf.split_feature);
    goes_left_.assign(cols_[0].size(), 0);
    const auto& order = leaf.sorted[f];
    for (std::size_t i = 0; i <= leaf.split_pos; ++i) goes_left_[order[i]] = 1;
    Leaf l, r;
    l.sorted.resize(cols_.size());
    r.sorted.resize(cols_.size());
    for (auto row : leaf.rows) (goes_left_[row] ? l : r).rows.push_back(row);
    for (std::size_t k = 0; k < cols_.size(); ++k)
      for (auto row : leaf.sorted[k]) (goes_left_[row] ? l : r).sorted[k].push_back(row);
    return {std::move(l), std::move(r)};
  }

  const std::vector<std::vector<double>>& cols_;
  const std::vector<std::vector<std::uint32_t>>& presorted_;
  const TrainConfig& cfg_;
  const std::vector<double>* grad_ = nullptr;
  const std::vector<double>* hess_ = nullptr;
  std::vector<char> goes_left_;
};

// The current top candidate of a group; the group is in para_id order, so
// ties keep the lower id.
// The row that ranks first, using the same tie-break as rank_rows.
inline std::size_t group_top(const FeatureMatrix& m, const std::vector<std::size_t>& group,
                             const std::vector<double>& scores) {
  std::size_t top = group.front();
  for (auto i : group)
    if (scores[i] > scores[top] ||
        (scores[i] == scores[top] && m.rows[i].para_id < m.rows[top].para_id))
      top = i;
  return top;
}

// Gradients and hessians of the objective at the current scores.
inline void compute_gradients(Objective obj, const FeatureMatrix& m,
                              const std::vector<std::vector<std::size_t>>& groups,
                              const std::vector<double>& scores, std::vector<double>& grad,
                              std::vector<double>& hess) {
  const std::size_t n = m.rows.size();
  grad.assign(n, 0.0);
  hess.assign(n, 0.0);
  if (obj == Objective::pointwise_logistic) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(scores[i]);
      grad[i] = p - static_cast<double>(*m.rows[i].label);
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    return;
  }
  // Pairwise logistic gradients weighted by |delta NDCG@1| of swapping the
  // pair. With binary gains only pairs involving the current top candidate
  // have a nonzero weight, and that weight is exactly 1.
  for (const auto& group : groups) {
    const std::size_t top = group_top(m, group, scores);
    for (auto i : group) {
      if (*m.rows[i].label != 1) continue;
      for (auto j : group) {
        if (*m.rows[j].label != 0 || (i != top && j != top)) continue;
        const double rho = sigmoid(scores[j] - scores[i]);
        grad[i] -= rho;
        grad[j] += rho;
        const double hw = std::max(rho * (1.0 - rho), 1e-16);
        hess[i] += hw;
        hess[j] += hw;
      }
    }
  }
}

// Mean logistic loss (pointwise) or mean pairwise logistic loss over all
// (positive, negative) pairs within a query (lambdarank).
inline double objective_value(Objective obj, const FeatureMatrix& m,
                              const std::vector<std::vector<std::size_t>>& groups,
                              const std::vector<double>& scores) {
  if (obj == Objective::pointwise_logistic) {
    double loss = 0.0;
    for (std::size_t i = 0; i < m.rows.size(); ++i)
      loss += *m.rows[i].label == 1 ? softplus(-scores[i]) : softplus(scores[i]);
    return loss / static_cast<double>(m.rows.size());
  }
  double loss = 0.0;
  std::size_t pairs = 0;
  for (const auto& group : groups)
    for (auto i : group) {
      if (*m.rows[i].label != 1) continue;
      for (auto j : group) {
        if (*m.rows[j].label != 0) continue;
        loss += softplus(scores[j] - scores[i]);
        ++pairs;
      }
    }
  return pairs ? loss / static_cast<double>(pairs) : 0.0;
}

inline std::vector<std::vector<double>> columns_of(const FeatureMatrix& m) {
  std::vector<std::vector<double>> cols(m.schema.size(), std::vector<double>(m.rows.size()));
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    for (std::size_t f = 0; f < m.schema.size(); ++f) cols[f][i] = m.rows[i].values[f];
  return cols;
}

}  // namespace detail

/// Fits a boosted forest on `train`, selecting the round with the best
/// validation NDCG@1 (earliest on ties).
inline std::pair<GbdtModel, TrainHistory> train_gbdt(const FeatureMatrix& train,
                                                     const FeatureMatrix& valid,
                                                     const TrainConfig& cfg = {}) {
  cfg.validate();
  if (!(train.schema == valid.schema))
    throw SchemaError("train schema '" + train.schema.joined() + "' differs from valid schema '" +
                      valid.schema.joined() + "'");
  train.validate();
  valid.validate();
  if (train.rows.empty()) throw DataError("training matrix is empty");
  if (valid.rows.empty()) throw DataError("validation matrix is empty");
  if (!train.labeled()) throw DataError("training matrix has unlabeled rows");
  if (!valid.labeled()) throw DataError("validation matrix has unlabeled rows");
  if (train.rows.size() > UINT32_MAX) throw DataError("training matrix too large");

  GbdtModel model;
  model.schema = train.schema;
  model.schema_fingerprint = train.schema.fingerprint();
  model.learning_rate = cfg.learning_rate;
  model.config = cfg;
  TrainHistory history;

  const std::size_t n = train.rows.size();
  std::size_t positives = 0;
  for (const auto& r : train.rows) positives += static_cast<std::size_t>(*r.label);
  if (positives == 0 || positives == n) {
    history.warnings.push_back(
        std::string("training labels are all ") + (positives == 0 ? "0" : "1") +
        "; returning a constant model");
    return {std::move(model), std::move(history)};
  }
  if (cfg.objective == Objective::pointwise_logistic)
    model.base_score = std::log(static_cast<double>(positives) / static_cast<double>(n - positives));

  const auto cols = detail::columns_of(train);
  std::vector<std::vector<std::uint32_t>> presorted(cols.size());
  for (std::size_t f = 0; f < cols.size(); ++f) {
    auto& order = presorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return cols[f][a] < cols[f][b]; });
  }
  const auto groups = detail::query_groups(train);
  const GoldSets valid_gold = valid.gold();

  // Running leaf sums; scores are always base + lr * sum, the same arithmetic
  // as GbdtModel::predict_row.
  std::vector<double> train_sum(n, 0.0), valid_sum(valid.rows.size(), 0.0);
  std::vector<double> train_scores(n, model.base_score), valid_scores(valid.rows.size());
  std::vector<double> grad, hess;
  std::vector<char> in_bag(n, 1);
  std::mt19937_64 rng(cfg.seed);
  detail::TreeBuilder builder(cols, presorted, cfg);

  double best_ndcg = -1.0;
  for (std::size_t round = 1; round <= cfg.num_rounds; ++round) {
    detail::compute_gradients(cfg.objective, train, groups, train_scores, grad, hess);
    if (cfg.bagging_fraction < 1.0) {
      for (std::size_t i = 0; i < n; ++i)
        in_bag[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 < cfg.bagging_fraction;
    }
    model.trees.push_back(builder.build(grad, hess, in_bag));
    const auto& tree = model.trees.back();

    for (std::size_t i = 0; i < n; ++i) {
      train_sum[i] += tree.predict(train.rows[i].values);
      train_scores[i] = model.base_score + model.learning_rate * train_sum[i];
    }
    for (std::size_t i = 0; i < valid.rows.size(); ++i) {
      valid_sum[i] += tree.predict(valid.rows[i].values);
      valid_scores[i] = model.base_score + model.learning_rate * valid_sum[i];
    }
    const double loss = detail::objective_value(cfg.objective, train, groups, train_scores);
    const double ndcg = ndcg_at_1(rank_rows(valid, valid_scores), valid_gold);
    history.rounds.push_back({loss, ndcg});
    if (ndcg > best_ndcg) {
      best_ndcg = ndcg;
      history.best_iteration = round;
    }
    if (round - history.best_iteration >= cfg.early_stop_patience) break;
  }

  model.best_iteration = history.best_iteration;
  model.trees.resize(model.best_iteration);
  return {std::move(model), std::move(history)};
}

/// Mean logistic loss of a model's scores on a labeled matrix.
inline double pointwise_loss(const GbdtModel& model, const FeatureMatrix& m) {
  if (m.rows.empty()) return 0.0;
  const auto scores = predict_scores(model, m);
  return detail::objective_value(Objective::pointwise_logistic, m, {}, scores);
}

/// Concatenates two matrices with the same schema and disjoint pairs.
inline FeatureMatrix merge_matrices(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (!(a.schema == b.schema)) throw SchemaError("cannot merge matrices with different schemas");
  FeatureMatrix out = a;
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  out.validate();
  return out;
}

/// Final retraining on train+valid with a (typically smaller) patience,
/// then prediction on the test matrix. Early stopping watches NDCG@1 on the
/// merged data itself; test labels, if any, never influence the model.
inline std::pair<GbdtModel, RankedRun> retrain_final(const FeatureMatrix& merged,
                                                     const FeatureMatrix& test,
                                                     const TrainConfig& cfg,
                                                     TrainHistory* history_out = nullptr) {
  auto [model, history] = train_gbdt(merged, merged, cfg);
  RankedRun run = predict(model, test);
  if (history_out) *history_out = std::move(history);
  return {std::move(model), std::move(run)};
}

// Serialization ------------------------------------------------------------

inline nlohmann::ordered_json config_to_json(const TrainConfig& c) {
  using detail::format_double;
  nlohmann::ordered_json j;
  j["objective"] = objective_name(c.objective);
  j["num_rounds"] = c.num_rounds;
  j["learning_rate"] = format_double(c.learning_rate);
  j["max_leaves"] = c.max_leaves;
  j["min_samples_leaf"] = c.min_samples_leaf;
  j["early_stop_patience"] = c.early_stop_patience;
  j["lambda"] = format_double(c.lambda);
  j["min_split_gain"] = format_double(c.min_split_gain);
  j["bagging_fraction"] = format_double(c.bagging_fraction);
  j["seed"] = c.seed;
  return j;
}

namespace detail {
inline double json_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError("model", 1, std::string("expected decimal string for '") + key + "'");
  auto s = j[key].get<std::string>();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("model", 1, "invalid number '" + s + "' for '" + key + "'");
  return v;
}
}  // namespace detail

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.objective = parse_objective(j.at("objective").get<std::string>());
  c.num_rounds = j.at("num_rounds").get<std::size_t>();
  c.learning_rate = detail::json_double(j, "learning_rate");
  c.max_leaves = j.at("max_leaves").get<std::size_t>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
  c.early_stop_patience = j.at("early_stop_patience").get<std::size_t>();
  c.lambda = detail::json_double(j, "lambda");
  c.min_split_gain = detail::json_double(j, "min_split_gain");
  c.bagging_fraction = detail::json_double(j, "bagging_fraction");
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

/// Self-describing JSON. Reals are stored as shortest round-trip decimal
/// strings, so a loaded model predicts bit-identically.
inline std::string model_to_json(const GbdtModel& m) {
  using detail::format_double;
  nlohmann::ordered_json j;
  j["format"] = "entailrank-gbdt";
  j["version"] = 1;
  j["schema"] = m.schema.names();
  j["schema_fingerprint"] = m.schema_fingerprint;
  j["base_score"] = format_double(m.base_score);
  j["learning_rate"] = format_double(m.learning_rate);
  j["best_iteration"] = m.best_iteration;
  j["config"] = config_to_json(m.config);
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : m.trees) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : t.nodes) {
      nlohmann::ordered_json node;
      if (n.is_leaf()) {
        node["leaf"] = format_double(n.value);
      } else {
        node["feature"] = n.feature;
        node["threshold"] = format_double(n.threshold);
        node["default_left"] = n.default_left;
        node["left"] = n.left;
        node["right"] = n.right;
      }
      nodes.push_back(std::move(node));
    }
    trees.push_back(nlohmann::ordered_json{{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump(1) + '\n';
}

inline GbdtModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("model", 1, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "entailrank-gbdt" || j.at("version") != 1)
      throw ParseError("model", 1, "unsupported model format");
    GbdtModel m;
    m.schema = FeatureSchema(j.at("schema").get<std::vector<std::string>>());
    m.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
    if (m.schema_fingerprint != m.schema.fingerprint())
      throw SchemaError("model schema fingerprint does not match its schema");
    m.base_score = detail::json_double(j, "base_score");
    m.learning_rate = detail::json_double(j, "learning_rate");
    m.best_iteration = j.at("best_iteration").get<std::size_t>();
    m.config = config_from_json(j.at("config"));
    for (const auto& jt : j.at("trees")) {
      RegressionTree t;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        if (jn.contains("leaf")) {
          n.value = detail::json_double(jn, "leaf");
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = detail::json_double(jn, "threshold");
          n.default_left = jn.at("default_left").get<bool>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        t.nodes.push_back(n);
      }
      const int count = static_cast<int>(t.nodes.size());
      if (count == 0) throw ParseError("model", 1, "tree without nodes");
      for (int i = 0; i < count; ++i) {
        const auto& n = t.nodes[static_cast<std::size_t>(i)];
        if (n.is_leaf()) continue;
        if (static_cast<std::size_t>(n.feature) >= m.schema.size())
          throw ParseError("model", 1, "node feature index out of range");
        // Children always follow their parent, which also rules out cycles.
        if (n.left <= i || n.left >= count || n.right <= i || n.right >= count)
          throw ParseError("model", 1, "node child index out of range");
      }
      m.trees.push_back(std::move(t));
    }
    if (m.best_iteration > m.trees.size())
      throw ParseError("model", 1, "best_iteration exceeds the number of trees");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model", 1, std::string("malformed model: ") + e.what());
  }
}

inline void save_model(const GbdtModel& m, const std::string& path) {
  detail::write_file(path, model_to_json(m));
}

inline GbdtModel load_model(const std::string& path) {
  return model_from_json(detail::read_file(path));
}

inline std::string format_history(const TrainHistory& h) {
  std::string out = "round\ttrain_loss\tvalid_ndcg@1\n";
  for (std::size_t i = 0; i < h.rounds.size(); ++i)
    out += std::to_string(i + 1) + '\t' + detail::format_double(h.rounds[i].train_loss) + '\t' +
           detail::format_double(h.rounds[i].valid_ndcg_at_1) + '\n';
  return out;
}

}  // namespace entailrank
