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

#include "entailrank/gbdt.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "ltr_fixtures.hpp"
#include "test_util.hpp"

namespace entailrank {
namespace {

using testing::noisy_matrix;
using testing::separable_matrix;

std::size_t argmax_earliest(const TrainHistory& h) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.rounds.size(); ++i)
    if (h.rounds[i].valid_ndcg_at_1 > h.rounds[best].valid_ndcg_at_1) best = i;
  return best + 1;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.num_rounds = 100;
  cfg.max_leaves = 7;
  cfg.min_samples_leaf = 3;
  cfg.early_stop_patience = 100;
  cfg.seed = 1;
  return cfg;
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.early_stop_patience = c.num_rounds + 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_objective("listwise"), ConfigError);
  EXPECT_EQ(parse_objective("lambdarank_at_1"), Objective::lambdarank_at_1);
}

TEST(Train, SeparableReachesPerfectValidation) {
  const auto train = separable_matrix(1, 200, "t");
  const auto valid = separable_matrix(2, 50, "v");
  auto [model, hist] = train_gbdt(train, valid, small_config());
  EXPECT_LE(hist.rounds.size(), 100u);
  EXPECT_EQ(hist.rounds[model.best_iteration - 1].valid_ndcg_at_1, 1.0);
  // Split thresholds sit on observed training values, so a held-out query is
  // only guaranteed when its negatives stay inside the training range.
  double max_negative = 0.0;
  for (const auto& r : train.rows)
    if (*r.label == 0) max_negative = std::max(max_negative, r.values[2]);
  const auto held_out = separable_matrix(3, 50, "h");
  const auto run = predict(model, held_out);
  const auto gold = held_out.gold();
  std::set<std::string> outside;
  for (const auto& r : held_out.rows)
    if (*r.label == 0 && r.values[2] > max_negative) outside.insert(r.query_id);
  for (const auto& [qid, entry] : run) {
    if (outside.count(qid)) continue;
    EXPECT_TRUE(gold.at(qid).count(entry.front().para_id)) << qid;
  }
  EXPECT_LT(outside.size(), 10u);
}

TEST(Train, LambdarankOnSeparableData) {
  auto cfg = small_config();
  cfg.objective = Objective::lambdarank_at_1;
  const auto train = separable_matrix(4, 200, "t");
  const auto valid = separable_matrix(5, 50, "v");
  auto [model, hist] = train_gbdt(train, valid, cfg);
  EXPECT_EQ(model.base_score, 0.0);
  EXPECT_EQ(ndcg_at_1(predict(model, valid), valid.gold()), 1.0);
}

TEST(Train, SameSeedBitIdentical) {
  const auto train = noisy_matrix(6, 60, "t");
  const auto valid = noisy_matrix(7, 30, "v");
  auto cfg = small_config();
  cfg.bagging_fraction = 0.7;
  cfg.seed = 99;
  const auto a = train_gbdt(train, valid, cfg).first;
  const auto b = train_gbdt(train, valid, cfg).first;
  EXPECT_EQ(model_to_json(a), model_to_json(b));
  cfg.seed = 100;
  EXPECT_NE(model_to_json(a), model_to_json(train_gbdt(train, valid, cfg).first));
}

TEST(Train, AllNegativeLabelsGiveConstantModel) {
  auto train = separable_matrix(8, 20, "t");
  for (auto& r : train.rows) r.label = 0;
  auto valid = train;
  auto [model, hist] = train_gbdt(train, valid, small_config());
  EXPECT_TRUE(model.trees.empty());
  EXPECT_EQ(model.best_iteration, 0u);
  ASSERT_EQ(hist.warnings.size(), 1u);
  const auto scores = predict_scores(model, valid);
  for (double s : scores) EXPECT_EQ(s, scores.front());
  EXPECT_EQ(ndcg_at_1(predict(model, valid), valid.gold()), 0.0);
}

TEST(Train, Errors) {
  const auto train = separable_matrix(9, 10, "t");
  auto unlabeled = train;
  unlabeled.rows[0].label.reset();
  EXPECT_THROW(train_gbdt(unlabeled, train, small_config()), DataError);
  EXPECT_THROW(train_gbdt(train, unlabeled, small_config()), DataError);
  FeatureMatrix other{FeatureSchema({"x"}), {{"q", "p", 1, {1.0}}}};
  EXPECT_THROW(train_gbdt(train, other, small_config()), SchemaError);
  FeatureMatrix empty{train.schema, {}};
  EXPECT_THROW(train_gbdt(empty, train, small_config()), DataError);
}

TEST(Predict, ZeroTreeModelOrdersByParaId) {
  GbdtModel model;
  model.schema = testing::synthetic_schema();
  model.schema_fingerprint = model.schema.fingerprint();
  model.base_score = 0.25;
  const auto m = separable_matrix(10, 3, "q");
  const auto run = predict(model, m);
  for (const auto& [qid, entry] : run) {
    for (std::size_t i = 0; i < entry.size(); ++i) {
      EXPECT_EQ(entry[i].score, 0.25);
      if (i > 0) {
        EXPECT_LT(entry[i - 1].para_id, entry[i].para_id);
      }
    }
  }
}

TEST(Predict, RowPermutationInvariant) {
  const auto train = noisy_matrix(11, 40, "t");
  const auto model = train_gbdt(train, train, small_config()).first;
  auto shuffled = noisy_matrix(12, 20, "v");
  const auto expected = predict(model, shuffled);
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
  EXPECT_EQ(predict(model, shuffled), expected);
}

TEST(Predict, FingerprintMismatch) {
  const auto train = separable_matrix(13, 20, "t");
  const auto model = train_gbdt(train, train, small_config()).first;
  FeatureMatrix other = train;
  other.schema = FeatureSchema({"f0", "f1", "f2", "f3", "f4", "f5", "f6", "f7", "z"});
  EXPECT_THROW(predict(model, other), SchemaError);
}

TEST(Predict, MatchesDocumentedSum) {
  const auto train = noisy_matrix(14, 40, "t");
  const auto model = train_gbdt(train, train, small_config()).first;
  ASSERT_FALSE(model.trees.empty());
  for (const auto& row : train.rows) {
    double sum = 0.0;
    for (const auto& t : model.trees) sum += t.predict(row.values);
    EXPECT_EQ(model.predict_row(row.values), model.base_score + model.learning_rate * sum);
    for (const auto& t : model.trees)
      for (const auto& n : t.nodes) {
        if (!n.is_leaf()) {
          EXPECT_LT(static_cast<std::size_t>(n.feature), model.schema.size());
        }
      }
  }
}

TEST(EarlyStopping, BestIterationIsHistoryArgmax) {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const auto train = noisy_matrix(seed, 25, "t");
    const auto valid = noisy_matrix(seed + 100, 150, "v");
    TrainConfig cfg = small_config();
    cfg.num_rounds = 200;
    cfg.early_stop_patience = 50;
    cfg.learning_rate = 0.3;
    cfg.min_samples_leaf = 1;
    cfg.max_leaves = 15;
    auto [model, hist] = train_gbdt(train, valid, cfg);
    EXPECT_EQ(model.best_iteration, argmax_earliest(hist));
    EXPECT_EQ(hist.best_iteration, model.best_iteration);
    EXPECT_EQ(model.trees.size(), model.best_iteration);
    EXPECT_LE(hist.rounds.size(), model.best_iteration + cfg.early_stop_patience);
  }
}

TEST(EarlyStopping, SmallerPatienceStopsNoLater) {
  for (std::uint64_t seed : {31u, 32u, 33u, 34u}) {
    const auto train = noisy_matrix(seed, 25, "t");
    const auto valid = noisy_matrix(seed + 100, 150, "v");
    TrainConfig cfg = small_config();
    cfg.num_rounds = 200;
    cfg.learning_rate = 0.3;
    cfg.min_samples_leaf = 1;
    cfg.max_leaves = 15;
    cfg.early_stop_patience = 50;
    const auto wide = train_gbdt(train, valid, cfg);
    cfg.early_stop_patience = 10;
    const auto narrow = train_gbdt(train, valid, cfg);
    EXPECT_LE(narrow.first.best_iteration, wide.first.best_iteration);
    EXPECT_LE(narrow.second.rounds.size(), wide.second.rounds.size());
  }
}

TEST(RetrainFinal, FullPatienceMatchesPlainTraining) {
  const auto merged = noisy_matrix(41, 40, "t");
  auto test = noisy_matrix(42, 10, "x");
  for (auto& r : test.rows) r.label.reset();
  TrainConfig cfg = small_config();
  cfg.num_rounds = 40;
  cfg.early_stop_patience = 40;
  TrainHistory hist;
  auto [model, run] = retrain_final(merged, test, cfg, &hist);
  const auto plain = train_gbdt(merged, merged, cfg);
  EXPECT_EQ(model_to_json(model), model_to_json(plain.first));
  EXPECT_EQ(run, predict(plain.first, test));
  EXPECT_EQ(hist.rounds.size(), plain.second.rounds.size());
  const auto again = retrain_final(merged, test, cfg);
  EXPECT_EQ(model_to_json(again.first), model_to_json(model));
}

TEST(RetrainFinal, TestLabelsDoNotInfluenceModel) {
  const auto merged = noisy_matrix(43, 40, "t");
  auto labeled = noisy_matrix(44, 10, "x");
  auto unlabeled = labeled;
  for (auto& r : unlabeled.rows) r.label.reset();
  TrainConfig cfg = small_config();
  cfg.early_stop_patience = 10;
  EXPECT_EQ(model_to_json(retrain_final(merged, labeled, cfg).first),
            model_to_json(retrain_final(merged, unlabeled, cfg).first));
}

TEST(Guard, PointwiseLossNonIncreasing) {
  for (auto [train, valid] : {std::pair{separable_matrix(51, 200, "t"), separable_matrix(52, 50, "v")},
                              std::pair{noisy_matrix(53, 100, "t"), noisy_matrix(54, 50, "v")}}) {
    TrainConfig cfg = small_config();
    cfg.max_leaves = 31;
    cfg.min_samples_leaf = 5;
    auto hist = train_gbdt(train, valid, cfg).second;
    ASSERT_GT(hist.rounds.size(), 1u);
    for (std::size_t i = 1; i < hist.rounds.size(); ++i)
      EXPECT_LE(hist.rounds[i].train_loss, hist.rounds[i - 1].train_loss) << "round " << i + 1;
  }
}

TEST(Invariance, MonotoneColumnTransform) {
  auto train = noisy_matrix(61, 60, "t");
  auto valid = noisy_matrix(62, 40, "v");
  const auto cfg = small_config();
  const auto before = predict(train_gbdt(train, valid, cfg).first, valid);
  for (std::size_t col : {0u, 3u}) {
    auto t2 = train, v2 = valid;
    for (auto* m : {&t2, &v2})
      for (auto& r : m->rows) r.values[col] = std::exp(3.0 * r.values[col]) - 7.0;
    const auto after = predict(train_gbdt(t2, v2, cfg).first, v2);
    for (const auto& [qid, entry] : before) {
      const auto& other = after.at(qid);
      ASSERT_EQ(entry.size(), other.size());
      for (std::size_t i = 0; i < entry.size(); ++i) EXPECT_EQ(entry[i].para_id, other[i].para_id);
    }
  }
}

TEST(Serialization, SaveLoadBitExact) {
  const auto train = noisy_matrix(71, 40, "t");
  auto cfg = small_config();
  cfg.learning_rate = 0.37;
  const auto model = train_gbdt(train, train, cfg).first;
  testing::TempDir tmp;
  save_model(model, tmp.file("model.json"));
  const auto loaded = load_model(tmp.file("model.json"));
  EXPECT_EQ(loaded.trees, model.trees);
  EXPECT_EQ(loaded.best_iteration, model.best_iteration);
  for (const auto& row : train.rows)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(loaded.predict_row(row.values)),
              std::bit_cast<std::uint64_t>(model.predict_row(row.values)));
  EXPECT_EQ(model_to_json(loaded), model_to_json(model));
}

TEST(Serialization, RejectsCorruptModels) {
  const auto train = separable_matrix(72, 20, "t");
  const auto text = model_to_json(train_gbdt(train, train, small_config()).first);
  EXPECT_THROW(model_from_json("{"), ParseError);
  auto j = nlohmann::json::parse(text);
  j["format"] = "other";
  EXPECT_THROW(model_from_json(j.dump()), DataError);
  j = nlohmann::json::parse(text);
  j["schema_fingerprint"] = "0000";
  EXPECT_THROW(model_from_json(j.dump()), DataError);
}

}  // namespace
}  // namespace entailrank
