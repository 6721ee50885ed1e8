// Copyright 2026 The summ Authors.
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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "summ/corpus.hpp"
#include "summ/proxy.hpp"

namespace summ {
namespace {

bool is_subsequence(const Tokens& sub, const Tokens& seq) {
  std::size_t j = 0;
  for (const auto& t : seq)
    if (j < sub.size() && sub[j] == t) ++j;
  return j == sub.size();
}

SummaryPair pair_of(std::vector<Tokens> doc, std::vector<Tokens> sum) {
  SummaryPair p;
  p.document.id = "d";
  p.document.sentences = std::move(doc);
  p.summary = std::move(sum);
  return p;
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, LowercasesAndSplitsPunctuation) {
  EXPECT_EQ(tokenize("The cat."), (Tokens{"the", "cat", "."}));
}

TEST(Tokenize, CollapsesWhitespace) { EXPECT_EQ(tokenize("A  B"), (Tokens{"a", "b"})); }

TEST(Tokenize, IdempotentOnJoinedOutput) {
  for (const char* text : {"Hello, World!", "it's 3.5 o'clock -- ok?", "  a\tb\nc  ", "(x)[y]{z}"}) {
    const Tokens once = tokenize(text);
    EXPECT_EQ(tokenize(join_tokens(once)), once) << text;
  }
}

TEST(Vocabulary, FewerTokensThanCap) {
  const auto v = Vocabulary::build({pair_of({{"x", "y"}}, {{"x"}})}, 30000);
  EXPECT_EQ(v.size(), 2u + Vocabulary::kNumReserved);
}

TEST(Vocabulary, FrequencyTieBrokenLexicographically) {
  // a:3, b:3, c:1 with room for two words.
  const auto v = Vocabulary::build({pair_of({{"b", "a", "c"}, {"a", "b"}}, {{"b", "a"}})},
                                   2 + Vocabulary::kNumReserved);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(v.encode("c"), Vocabulary::kUnk);
}

TEST(Vocabulary, TieOrderDoesNotDependOnInputOrder) {
  const auto v1 = Vocabulary::build({pair_of({{"q", "p"}}, {{"r"}})}, 30000);
  const auto v2 = Vocabulary::build({pair_of({{"r", "p"}}, {{"q"}})}, 30000);
  EXPECT_EQ(v1.words(), v2.words());
}

TEST(Vocabulary, RoundTripAndUnknown) {
  const auto v = Vocabulary::build({pair_of({{"one", "two", "three"}}, {{"two"}})}, 30000);
  for (const auto& w : v.words()) EXPECT_EQ(v.decode(v.encode(w)), w);
  EXPECT_EQ(v.encode("missing"), Vocabulary::kUnk);
  const std::set<int> reserved{Vocabulary::kPad, Vocabulary::kUnk, Vocabulary::kStart, Vocabulary::kEnd};
  EXPECT_EQ(reserved.size(), 4u);
  EXPECT_EQ(Vocabulary::from_words(v.words()).words(), v.words());
}

TEST(Vocabulary, EmptyCorpusThrows) { EXPECT_THROW(Vocabulary::build({}, 100), std::invalid_argument); }

TEST(Truncate, CutsLongSentences) {
  Tokens src(150, "s"), tgt(40, "t"), short_src(5, "u");
  const auto out = truncate_pair(pair_of({src, short_src}, {tgt}), 100, 30);
  EXPECT_EQ(out.document.sentences[0].size(), 100u);
  EXPECT_EQ(out.document.sentences[1], short_src);
  EXPECT_EQ(out.summary[0].size(), 30u);
}

TEST(Synthetic, NoiseFreeSummariesAreSubsequences) {
  SyntheticSpec spec;
  spec.n_docs = 100;
  spec.noise_rate = 0.0;
  for (const auto& p : generate_synthetic_corpus(spec)) {
    ASSERT_EQ(p.summary.size(), p.salient.size());
    for (std::size_t t = 0; t < p.summary.size(); ++t) {
      EXPECT_TRUE(is_subsequence(p.summary[t], p.document.sentences[static_cast<std::size_t>(p.salient[t])]));
    }
    EXPECT_TRUE(std::is_sorted(p.salient.begin(), p.salient.end()));
    EXPECT_EQ(match_proxy_labels(p).indices, p.salient);
  }
}

TEST(Synthetic, SameSeedSameCorpus) {
  SyntheticSpec spec;
  spec.n_docs = 30;
  const auto a = generate_synthetic_corpus(spec);
  const auto b = generate_synthetic_corpus(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].document.sentences, b[i].document.sentences);
    EXPECT_EQ(a[i].summary, b[i].summary);
  }
  spec.seed = 2;
  EXPECT_NE(generate_synthetic_corpus(spec)[0].document.sentences, a[0].document.sentences);
}

TEST(Synthetic, SalientCountSetsSummaryLength) {
  SyntheticSpec spec;
  spec.n_docs = 20;
  spec.salient_per_doc = 2;
  for (const auto& p : generate_synthetic_corpus(spec)) EXPECT_EQ(p.summary.size(), 2u);
}

TEST(Synthetic, InvalidCountsThrow) {
  SyntheticSpec spec;
  spec.salient_per_doc = 11;
  EXPECT_THROW(generate_synthetic_corpus(spec), std::invalid_argument);
  spec = {};
  spec.n_docs = 0;
  EXPECT_THROW(generate_synthetic_corpus(spec), std::invalid_argument);
  spec = {};
  spec.noise_rate = 1.5;
  EXPECT_THROW(generate_synthetic_corpus(spec), std::invalid_argument);
}

TEST(Jsonl, RoundTripAndEmptySentenceFilter) {
  const auto dir = std::filesystem::temp_directory_path() / "summ_test_corpus";
  std::filesystem::create_directories(dir);
  SyntheticSpec spec;
  spec.n_docs = 5;
  const auto corpus = generate_synthetic_corpus(spec);
  write_jsonl(dir / "c.jsonl", corpus);
  const auto back = read_jsonl(dir / "c.jsonl");
  ASSERT_EQ(back.size(), corpus.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].document.id, corpus[i].document.id);
    EXPECT_EQ(back[i].document.sentences, corpus[i].document.sentences);
    EXPECT_EQ(back[i].summary, corpus[i].summary);
    EXPECT_EQ(back[i].salient, corpus[i].salient);
  }
  {
    std::ofstream out(dir / "e.jsonl");
    out << R"({"id":"x","article":["Hello there.","  ","Bye"],"abstract":["Hello"]})" << "\n";
  }
  const auto e = read_jsonl(dir / "e.jsonl");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].document.sentences, (std::vector<Tokens>{{"hello", "there", "."}, {"bye"}}));
}

TEST(Split, DeterministicPartition) {
  SyntheticSpec spec;
  spec.n_docs = 50;
  const auto corpus = generate_synthetic_corpus(spec);
  const auto a = split_validation(corpus, 0.2, 7);
  const auto b = split_validation(corpus, 0.2, 7);
  EXPECT_EQ(a.validation.size(), 10u);
  EXPECT_EQ(a.train.size(), 40u);
  for (std::size_t i = 0; i < a.validation.size(); ++i)
    EXPECT_EQ(a.validation[i].document.id, b.validation[i].document.id);
}

}  // namespace
}  // namespace summ
