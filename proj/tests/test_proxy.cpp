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

#include <filesystem>
#include <random>

#include "summ/corpus.hpp"
#include "summ/metrics.hpp"
#include "summ/proxy.hpp"

namespace summ {
namespace {

SummaryPair pair_of(std::vector<Tokens> doc, std::vector<Tokens> sum) {
  SummaryPair p;
  p.document.id = "d";
  p.document.sentences = std::move(doc);
  p.summary = std::move(sum);
  return p;
}

TEST(ProxyLabels, PicksHighestRecall) {
  EXPECT_EQ(match_proxy_labels(pair_of({{"a", "b", "c"}, {"d", "e", "f"}}, {{"d", "e"}})).indices,
            std::vector<int>{1});
}

TEST(ProxyLabels, IdentityAndTies) {
  EXPECT_EQ(match_proxy_labels(pair_of({{"x", "y"}, {"z"}}, {{"x", "y"}})).indices, std::vector<int>{0});
  EXPECT_EQ(match_proxy_labels(pair_of({{"q", "a"}, {"a", "q"}}, {{"a"}})).indices, std::vector<int>{0});
  // No overlap at all maps to 0.
  EXPECT_EQ(match_proxy_labels(pair_of({{"q"}, {"r"}}, {{"s"}})).indices, std::vector<int>{0});
}

TEST(ProxyLabels, RescanOracleOnRandomPairs) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> sym(0, 5), len(1, 6), cnt(1, 5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Tokens> doc(static_cast<std::size_t>(cnt(rng))), sum(static_cast<std::size_t>(cnt(rng)));
    for (auto* side : {&doc, &sum})
      for (auto& s : *side) {
        s.resize(static_cast<std::size_t>(len(rng)));
        for (auto& t : s) t = std::string(1, static_cast<char>('a' + sym(rng)));
      }
    const auto p = pair_of(doc, sum);
    const auto labels = match_proxy_labels(p);
    ASSERT_EQ(labels.indices.size(), sum.size());
    for (std::size_t t = 0; t < sum.size(); ++t) {
      // Independent scan: first index with the maximal LCS over |s_t|.
      int best = 0;
      std::size_t best_lcs = 0;
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto l = lcs_length<std::string>(doc[i], sum[t]);
        if (l > best_lcs) {
          best_lcs = l;
          best = static_cast<int>(i);
        }
      }
      EXPECT_EQ(labels.indices[t], best);
    }
    const auto pairs = build_abstractor_pairs(p, labels);
    ASSERT_EQ(pairs.size(), sum.size());
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      for (const auto& d : doc) EXPECT_GE(rouge_l(d, pairs[t].target).recall, 0.0);
      const double chosen = rouge_l(pairs[t].source, pairs[t].target).recall;
      for (const auto& d : doc) EXPECT_GE(chosen, rouge_l(d, pairs[t].target).recall);
    }
  }
}

TEST(AbstractorPairs, CardinalityAndRepetition) {
  const auto p = pair_of({{"a", "b"}, {"c", "d"}}, {{"c"}, {"d"}, {"a"}});
  const auto labels = match_proxy_labels(p);
  EXPECT_EQ(labels.indices, (std::vector<int>{1, 1, 0}));
  const auto pairs = build_abstractor_pairs(p, labels);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].source, pairs[1].source);
  EXPECT_EQ(pairs[1].target, Tokens{"d"});
}

TEST(AbstractorPairs, NoiseFreeTargetsAreSubsequences) {
  SyntheticSpec spec;
  spec.n_docs = 40;
  spec.noise_rate = 0.0;
  for (const auto& p : generate_synthetic_corpus(spec)) {
    for (const auto& sp : build_abstractor_pairs(p, match_proxy_labels(p))) {
      EXPECT_EQ(lcs_length<std::string>(sp.source, sp.target), sp.target.size());
    }
  }
}

TEST(LabelsJsonl, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "summ_test_labels.jsonl";
  const std::vector<ProxyLabels> labels{{"a", {0, 2}}, {"b", {1}}};
  write_labels_jsonl(path, labels);
  const auto back = read_labels_jsonl(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].pair_id, "a");
  EXPECT_EQ(back[0].indices, (std::vector<int>{0, 2}));
  EXPECT_EQ(back[1].indices, std::vector<int>{1});
}

}  // namespace
}  // namespace summ
