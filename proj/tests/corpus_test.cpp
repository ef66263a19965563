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

#include "entailrank/corpus.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "test_util.hpp"

namespace entailrank {
namespace {

using testing::TempDir;

const std::vector<std::string> kDefault{PlaceholderFilter::kDefaultPattern};

TEST(CleanText, RemovesPlaceholder) {
  EXPECT_EQ(clean_text("As noted FRAGMENT_SUPPRESSED above", kDefault), "As noted above");
  EXPECT_EQ(clean_text("see FRAGMANT_SUPPRESSED and REFERENCE_SUPPRESSED.", kDefault), "see and .");
}

TEST(CleanText, IdentityWithoutMatches) {
  EXPECT_EQ(clean_text("no placeholders here", kDefault), "no placeholders here");
}

TEST(CleanText, OnlyPlaceholdersLeavesEmpty) {
  EXPECT_EQ(clean_text("REFERENCE_SUPPRESSED REFERENCE_SUPPRESSED", kDefault), "");
}

TEST(CleanText, CollapsesWhitespace) {
  EXPECT_EQ(clean_text("  a \t\n b  ", kDefault), "a b");
}

TEST(CleanText, LowercaseLookalikeIsKept) {
  EXPECT_EQ(clean_text("fragment_suppressed stays", kDefault), "fragment_suppressed stays");
}

TEST(CleanText, InvalidPatternIsConfigError) {
  EXPECT_THROW(clean_text("x", {"([unclosed"}), ConfigError);
  EXPECT_THROW(clean_text("x", {""}), ConfigError);
}

TEST(CleanText, CustomPatternReachesFixedPoint) {
  // Deleting "ab" from "aabb" exposes a new "ab".
  EXPECT_EQ(clean_text("aabb x", {"ab"}), "x");
}

TEST(CleanText, IdempotentOnRandomStrings) {
  const std::vector<std::string> pieces{"FRAGMENT_SUPPRESSED", "REFERENCE_SUPPRESSED", "word", " ",
                                        "  ", "\t", "_", "X", "SUPPRESSED", ".", "a_SUPPRESSED"};
  std::mt19937_64 rng(11);
  const PlaceholderFilter filter;
  for (int iter = 0; iter < 500; ++iter) {
    std::string s;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    const auto once = filter.clean(s);
    EXPECT_EQ(filter.clean(once), once) << "input: '" << s << "'";
    // Glued forms such as "wordX_SUPPRESSED" have no word boundary and stay.
    EXPECT_FALSE(std::regex_search(once, std::regex(PlaceholderFilter::kDefaultPattern))) << once;
  }
}

TEST(IngestJsonl, TwoLines) {
  TempDir dir;
  auto path = dir.write("d.jsonl",
                        R"({"query_id":"q1","query_text":"Q one","candidates":[{"para_id":"p1","text":"A REFERENCE_SUPPRESSED b"}],"gold":["p1"]})"
                        "\n"
                        R"({"query_id":"q2","query_text":"Q two","candidates":[{"para_id":"p1","text":"x"},{"para_id":"p2","text":"y"}]})"
                        "\n");
  auto d = ingest_jsonl(path);
  ASSERT_EQ(d.instances.size(), 2u);
  EXPECT_EQ(d.instances[0].query_id, "q1");
  EXPECT_EQ(d.instances[0].candidates[0].clean_text, "A b");
  EXPECT_EQ(d.instances[0].gold, std::set<std::string>{"p1"});
  EXPECT_TRUE(d.instances[1].gold.empty());
}

TEST(IngestJsonl, GoldNotAmongCandidates) {
  TempDir dir;
  auto path = dir.write("d.jsonl",
                        R"({"query_id":"q1","query_text":"Q","candidates":[{"para_id":"p1","text":"a"}],"gold":["p9"]})"
                        "\n");
  try {
    ingest_jsonl(path);
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("q1"), std::string::npos);
  }
}

TEST(IngestJsonl, EmptyFile) {
  TempDir dir;
  auto d = ingest_jsonl(dir.write("e.jsonl", ""));
  EXPECT_TRUE(d.instances.empty());
  EXPECT_EQ(dataset_stats(d), StatsReport{});
}

TEST(IngestJsonl, MalformedLineNamesLine) {
  TempDir dir;
  auto path = dir.write("d.jsonl",
                        R"({"query_id":"q1","query_text":"Q","candidates":[{"para_id":"p1","text":"a"}]})"
                        "\n{not json\n");
  try {
    ingest_jsonl(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(IngestJsonl, DuplicateQueryAndEmptyPool) {
  TempDir dir;
  const std::string line =
      R"({"query_id":"q1","query_text":"Q","candidates":[{"para_id":"p1","text":"a"}]})";
  EXPECT_THROW(ingest_jsonl(dir.write("dup.jsonl", line + "\n" + line + "\n")), IntegrityError);
  EXPECT_THROW(ingest_jsonl(dir.write("empty.jsonl",
                                      R"({"query_id":"q1","query_text":"Q","candidates":[]})")),
               IntegrityError);
  EXPECT_THROW(ingest_jsonl(dir.file("missing.jsonl")), IoError);
}

TempDir make_coliee_tree(const std::string& labels) {
  TempDir dir;
  dir.write("cases/001/entailed_fragment.txt", "The officer FRAGMENT_SUPPRESSED erred.");
  dir.write("cases/001/paragraphs/001.txt", "First paragraph.");
  dir.write("cases/001/paragraphs/002.txt", "Second REFERENCE_SUPPRESSED paragraph.");
  dir.write("cases/001/paragraphs/003.txt", "Third paragraph.");
  if (!labels.empty()) dir.write("labels.json", labels);
  return dir;
}

TEST(IngestColiee, OneQueryThreeParagraphs) {
  auto dir = make_coliee_tree(R"({"001": ["002.txt"]})");
  auto d = ingest_coliee_dir(dir.file("cases"), dir.file("labels.json"));
  ASSERT_EQ(d.instances.size(), 1u);
  const auto& q = d.instances[0];
  EXPECT_EQ(q.query_id, "001");
  EXPECT_EQ(q.query_clean, "The officer erred.");
  ASSERT_EQ(q.candidates.size(), 3u);
  EXPECT_EQ(q.candidates[1].para_id, "002");
  EXPECT_EQ(q.candidates[1].clean_text, "Second paragraph.");
  EXPECT_EQ(q.gold, std::set<std::string>{"002"});
}

TEST(IngestColiee, NoLabelsMeansTestMode) {
  auto dir = make_coliee_tree("");
  auto d = ingest_coliee_dir(dir.file("cases"));
  ASSERT_EQ(d.instances.size(), 1u);
  EXPECT_TRUE(d.instances[0].gold.empty());
}

TEST(IngestColiee, LabelNamingMissingParagraph) {
  auto dir = make_coliee_tree(R"({"001": ["004.txt"]})");
  EXPECT_THROW(ingest_coliee_dir(dir.file("cases"), dir.file("labels.json")), IntegrityError);
}

TEST(IngestColiee, MissingQueryFile) {
  TempDir dir;
  dir.write("cases/001/paragraphs/001.txt", "p");
  EXPECT_THROW(ingest_coliee_dir(dir.file("cases")), IntegrityError);
}

TEST(IngestColiee, CustomLayout) {
  TempDir dir;
  dir.write("cases/a/query.txt", "q");
  dir.write("cases/a/paras/x.txt", "p");
  ColieeLayout layout{"query.txt", "paras"};
  auto d = ingest_coliee_dir(dir.file("cases"), "", layout);
  EXPECT_EQ(d.instances.at(0).candidates.at(0).para_id, "x");
}

Dataset synthetic(std::vector<std::pair<int, int>> shape) {
  Dataset d;
  int qi = 0;
  for (auto [cands, gold] : shape) {
    QueryInstance q;
    q.query_id = "q" + std::to_string(qi++);
    q.query_text = q.query_clean = "a b c";
    for (int i = 0; i < cands; ++i) {
      std::string pid = "p" + std::to_string(i);
      q.candidates.push_back({pid, "x y", "x y"});
      if (i < gold) q.gold.insert(pid);
    }
    d.instances.push_back(std::move(q));
  }
  return d;
}

TEST(DatasetStats, SingleInstance) {
  auto s = dataset_stats(synthetic({{4, 1}}));
  EXPECT_EQ(s.num_queries, 1u);
  EXPECT_DOUBLE_EQ(s.avg_candidates_per_query, 4.0);
  EXPECT_DOUBLE_EQ(s.avg_positives_per_query, 1.0);
  EXPECT_DOUBLE_EQ(s.avg_query_length, 3.0);
  EXPECT_DOUBLE_EQ(s.avg_candidate_length, 2.0);
}

TEST(DatasetStats, TwoInstances) {
  auto s = dataset_stats(synthetic({{2, 1}, {4, 2}}));
  EXPECT_EQ(s.num_queries, 2u);
  EXPECT_DOUBLE_EQ(s.avg_candidates_per_query, 3.0);
  EXPECT_DOUBLE_EQ(s.avg_positives_per_query, 1.5);
}

TEST(DatasetStats, StableThroughReserialization) {
  auto d = ingest_jsonl(testing::data_path("fixture_20.jsonl"));
  TempDir dir;
  write_jsonl(d, dir.file("round.jsonl"));
  auto again = ingest_jsonl(dir.file("round.jsonl"));
  EXPECT_EQ(dataset_stats(d), dataset_stats(again));
  EXPECT_EQ(d.instances, again.instances);
}

TEST(SplitValidation, SizesAndPartition) {
  auto d = synthetic(std::vector<std::pair<int, int>>(625, {3, 1}));
  auto [train, valid] = split_validation(d, 100, 42);
  EXPECT_EQ(train.instances.size(), 525u);
  EXPECT_EQ(valid.instances.size(), 100u);
  std::set<std::string> ids;
  for (const auto& q : train.instances) ids.insert(q.query_id);
  for (const auto& q : valid.instances) EXPECT_TRUE(ids.insert(q.query_id).second);
  EXPECT_EQ(ids.size(), 625u);
}

TEST(SplitValidation, Deterministic) {
  auto d = synthetic(std::vector<std::pair<int, int>>(250, {2, 1}));
  auto a = split_validation(d, 50, 7);
  auto b = split_validation(d, 50, 7);
  EXPECT_EQ(a.second.instances, b.second.instances);
  EXPECT_EQ(a.first.instances, b.first.instances);
  // Different seeds: a collision on 250 choose 50 would be astronomically rare.
  auto c = split_validation(d, 50, 8);
  EXPECT_NE(a.second.instances, c.second.instances);
}

TEST(SplitValidation, OutOfRange) {
  auto d = synthetic({{2, 1}, {2, 1}, {2, 1}});
  EXPECT_THROW(split_validation(d, 3, 1), ConfigError);
  EXPECT_THROW(split_validation(d, 0, 1), ConfigError);
}

}  // namespace
}  // namespace entailrank
