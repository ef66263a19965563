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

#include "entailrank/analyzer.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "entailrank/porter_stemmer.hpp"
#include "test_util.hpp"

namespace entailrank {
namespace {

using Tokens = std::vector<std::string>;

TEST(Analyze, LowercaseSplitNoStem) {
  AnalyzerConfig cfg{true, false, {}};
  EXPECT_EQ(analyze("The Court's ruling", cfg), (Tokens{"the", "court", "s", "ruling"}));
}

TEST(Analyze, Empty) { EXPECT_TRUE(analyze("", AnalyzerConfig{}).empty()); }

TEST(Analyze, StemmingOn) {
  EXPECT_EQ(analyze("running runs", AnalyzerConfig{}), (Tokens{"run", "run"}));
}

TEST(Analyze, StopwordsBeforeStemming) {
  AnalyzerConfig cfg{true, true, {"the", "running"}};
  EXPECT_EQ(analyze("The running courts", cfg), (Tokens{"court"}));
}

TEST(Analyze, CaseKeptWhenLowercaseOff) {
  AnalyzerConfig cfg{false, true, {}};
  // Mixed-case tokens are not stemmed.
  EXPECT_EQ(analyze("Courts courts", cfg), (Tokens{"Courts", "court"}));
}

TEST(Analyze, DigitsAndPunctuation) {
  AnalyzerConfig cfg{true, false, {}};
  EXPECT_EQ(analyze("s. 7(1)(b) -- 2023FC12", cfg), (Tokens{"s", "7", "1", "b", "2023fc12"}));
}

TEST(PorterStemmer, ReferenceVocabulary) {
  const PorterStemmer stem;
  const std::vector<std::pair<std::string, std::string>> cases{
      {"caresses", "caress"},   {"ponies", "poni"},         {"ties", "ti"},
      {"cats", "cat"},          {"feed", "feed"},           {"agreed", "agre"},
      {"plastered", "plaster"}, {"bled", "bled"},           {"motoring", "motor"},
      {"sing", "sing"},         {"conflated", "conflat"},   {"troubled", "troubl"},
      {"sized", "size"},        {"hopping", "hop"},         {"tanned", "tan"},
      {"falling", "fall"},      {"hissing", "hiss"},        {"fizzed", "fizz"},
      {"filing", "file"},       {"happy", "happi"},         {"sky", "sky"},
      {"relational", "relat"},  {"conditional", "condit"},  {"rational", "ration"},
      {"digitizer", "digit"},   {"vietnamization", "vietnam"}, {"hopefulness", "hope"},
      {"sensibiliti", "sensibl"}, {"electrical", "electr"}, {"allowance", "allow"},
      {"adjustable", "adjust"}, {"homologous", "homolog"},  {"bowdlerize", "bowdler"},
      {"controll", "control"},  {"generalizations", "gener"}, {"reasonableness", "reason"},
      {"archaeology", "archaeolog"}, {"a", "a"},            {"is", "is"},
  };
  for (const auto& [word, expected] : cases) EXPECT_EQ(stem(word), expected) << word;
}

// Frozen output of an independent Porter implementation over a generated
// vocabulary (see data/make_porter_oracle.py).
TEST(PorterStemmer, MatchesFrozenOracle) {
  std::ifstream in(testing::data_path("porter_oracle.tsv"));
  ASSERT_TRUE(in);
  const PorterStemmer stem;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    const auto word = line.substr(0, tab);
    EXPECT_EQ(stem(word), line.substr(tab + 1)) << word;
    ++n;
  }
  EXPECT_GT(n, 3000u);
}

TEST(Analyze, Deterministic) {
  const std::string text = "Judicial review of the tribunal's reasonableness, FRAGMENT 12.";
  EXPECT_EQ(analyze(text, AnalyzerConfig{}), analyze(text, AnalyzerConfig{}));
}

}  // namespace
}  // namespace entailrank
