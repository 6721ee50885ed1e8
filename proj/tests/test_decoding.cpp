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
#include <cmath>
#include <map>
#include <set>

#include "summ/decoding.hpp"
#include "summ/metrics.hpp"
#include "summ/random.hpp"

namespace summ {
namespace {

// Four output ids, 3 = END. Scores depend on the full history through a
// seeded hash, so every prefix sees a different distribution.
class ToyModel final : public BeamModel {
 public:
  explicit ToyModel(std::uint64_t seed) : seed_(seed) { nodes_.push_back({}); }
  int end_id() const override { return 3; }
  bool is_forbidden(int) const override { return false; }
  int root() override { return 0; }
  BeamStep scores(int state) override { return {log_probs(nodes_[static_cast<std::size_t>(state)]), 0}; }
  int advance(int state, int id) override {
    auto h = nodes_[static_cast<std::size_t>(state)];
    h.push_back(id);
    nodes_.push_back(h);
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<double> log_probs(const std::vector<int>& history) const {
    std::uint64_t s = seed_;
    for (int id : history) s = derive_seed(s, static_cast<std::uint64_t>(id) + 1);
    Rng rng(s);
    std::vector<double> logits(4);
    for (auto& x : logits) x = uniform(rng, -2, 2);
    double z = 0;
    for (double x : logits) z += std::exp(x);
    for (auto& x : logits) x -= std::log(z);
    return logits;
  }

 private:
  std::uint64_t seed_;
  std::vector<std::vector<int>> nodes_;
};

struct Sequence {
  std::vector<int> ids;
  double log_prob;
};

// Every trigram-blocked sequence of at most max_len ids followed by END.
void enumerate(const ToyModel& m, std::vector<int>& prefix, double lp, int max_len, std::vector<Sequence>& out) {
  const auto step = m.log_probs(prefix);
  out.push_back({prefix, lp + step[3]});
  if (static_cast<int>(prefix.size()) == max_len) return;
  for (int id = 0; id < 3; ++id) {
    if (creates_repeated_trigram<int>(prefix, id)) continue;
    prefix.push_back(id);
    enumerate(m, prefix, lp + step[static_cast<std::size_t>(id)], max_len, out);
    prefix.pop_back();
  }
}

std::vector<int> greedy_blocked(const ToyModel& m, int max_len) {
  std::vector<int> ids;
  while (static_cast<int>(ids.size()) < max_len) {
    const auto lp = m.log_probs(ids);
    int best = -1;
    for (int id = 0; id < 4; ++id) {
      if (id != 3 && creates_repeated_trigram<int>(ids, id)) continue;
      if (best < 0 || lp[static_cast<std::size_t>(id)] > lp[static_cast<std::size_t>(best)]) best = id;
    }
    if (best == 3) break;
    ids.push_back(best);
  }
  return ids;
}

TEST(BeamSearch, FullWidthRecoversEveryBlockedSequence) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ToyModel m(seed);
    std::vector<Sequence> all;
    std::vector<int> prefix;
    enumerate(m, prefix, 0.0, 4, all);
    const auto beams = beam_search(m, static_cast<int>(all.size()), 0.0, 4);
    ASSERT_EQ(beams.size(), all.size());
    std::map<std::vector<int>, double> expect;
    for (const auto& s : all) expect[s.ids] = s.log_prob;
    for (const auto& h : beams) {
      ASSERT_TRUE(expect.count(h.ids));
      EXPECT_NEAR(h.log_prob, expect[h.ids], 1e-12);
      EXPECT_DOUBLE_EQ(h.normalized, h.log_prob / static_cast<double>(h.ids.size() + 1));
    }
  }
}

TEST(BeamSearch, WidthFiveHypothesesAreDistinctBlockedAndSorted) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ToyModel m(seed);
    std::vector<Sequence> all;
    std::vector<int> prefix;
    enumerate(m, prefix, 0.0, 6, all);
    std::map<std::vector<int>, double> expect;
    for (const auto& s : all) expect[s.ids] = s.log_prob;
    for (double diversity : {0.0, 1.0}) {
      const auto beams = beam_search(m, 5, diversity, 6);
      ASSERT_GE(beams.size(), 1u);
      EXPECT_LE(beams.size(), 5u);
      std::set<std::vector<int>> seen;
      for (std::size_t i = 0; i < beams.size(); ++i) {
        EXPECT_TRUE(seen.insert(beams[i].ids).second);
        ASSERT_TRUE(expect.count(beams[i].ids));
        EXPECT_NEAR(beams[i].log_prob, expect[beams[i].ids], 1e-12);
        EXPECT_EQ(repeated_ngram_count<int>(beams[i].ids, 3), 0u);
        if (i > 0) EXPECT_GE(beams[i - 1].normalized, beams[i].normalized);
      }
    }
  }
}

TEST(BeamSearch, WidthOneWithoutDiversityIsGreedy) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ToyModel m(seed);
    const auto beams = beam_search(m, 1, 0.0, 8);
    ASSERT_EQ(beams.size(), 1u);
    EXPECT_EQ(beams[0].ids, greedy_blocked(m, 8));
  }
}

TEST(BeamSearch, LengthLimitForcesEnd) {
  ToyModel m(3);
  for (const auto& h : beam_search(m, 4, 1.0, 2)) {
    EXPECT_LE(h.ids.size(), 2u);
    EXPECT_TRUE(h.finished);
  }
}

TEST(BeamWidth, PruningSchedule) {
  EXPECT_EQ(beam_width_for(1), 5);
  EXPECT_EQ(beam_width_for(3), 5);
  EXPECT_EQ(beam_width_for(5), 5);
  EXPECT_EQ(beam_width_for(6), 4);
  EXPECT_EQ(beam_width_for(7), 3);
  EXPECT_EQ(beam_width_for(8), 3);
  EXPECT_EQ(beam_width_for(9), 2);
  EXPECT_EQ(beam_width_for(12), 2);
}

BeamHypothesis hyp(Tokens words, double normalized) {
  BeamHypothesis h;
  h.words = std::move(words);
  h.normalized = normalized;
  h.finished = true;
  return h;
}

TEST(Rerank, EnumeratesFullProduct) {
  std::vector<std::vector<BeamHypothesis>> beams(2);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 5; ++i) beams[static_cast<std::size_t>(s)].push_back(hyp({"w" + std::to_string(s * 5 + i)}, -i));
  const auto c = rerank(beams, 2);
  EXPECT_EQ(c.enumerated, 25u);
  EXPECT_FALSE(c.fell_back);
  EXPECT_EQ(c.choice, (std::vector<int>{0, 0}));
}

TEST(Rerank, FewestRepeatsWins) {
  std::vector<std::vector<BeamHypothesis>> beams{
      {hyp({"a", "b", "c"}, -0.1), hyp({"x", "y"}, -3.0)},
      {hyp({"a", "b", "a", "b"}, -0.1), hyp({"a", "b", "q"}, -0.2), hyp({"p", "q"}, -5.0)}};
  // Concatenations: (0,0) 3 repeats, (0,1) 1, (0,2) 0, (1,x) 2, 0, 0.
  const auto c = rerank(beams, 2);
  EXPECT_EQ(c.repeated, 0u);
  // Among zero-repeat options (0,2) scores -5.1, (1,1) -3.2, (1,2) -8.
  EXPECT_EQ(c.choice, (std::vector<int>{1, 1}));
  EXPECT_DOUBLE_EQ(c.score, -3.2);
}

TEST(Rerank, ExactTiesKeepFirstChoice) {
  std::vector<std::vector<BeamHypothesis>> beams{{hyp({"a"}, -1.0), hyp({"b"}, -1.0)}, {hyp({"c"}, -1.0), hyp({"d"}, -1.0)}};
  EXPECT_EQ(rerank(beams, 2).choice, (std::vector<int>{0, 0}));
}

TEST(Rerank, MatchesIndependentEnumeration) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 4);
    std::vector<std::vector<BeamHypothesis>> beams(n);
    for (auto& b : beams) {
      const std::size_t k = 1 + uniform_index(rng, 4);
      for (std::size_t i = 0; i < k; ++i) {
        Tokens w(2 + uniform_index(rng, 4));
        for (auto& t : w) t = std::string(1, static_cast<char>('a' + uniform_index(rng, 3)));
        b.push_back(hyp(w, -uniform(rng, 0, 3)));
      }
    }
    std::size_t best = SIZE_MAX;
    std::vector<int> idx(n, 0);
    for (;;) {
      std::vector<Tokens> sents;
      for (std::size_t s = 0; s < n; ++s) sents.push_back(beams[s][static_cast<std::size_t>(idx[s])].words);
      best = std::min(best, repeated_ngram_count<std::string>(concatenate(sents), 2));
      std::size_t s = n;
      while (s-- > 0) {
        if (++idx[s] < static_cast<int>(beams[s].size())) break;
        idx[s] = 0;
      }
      if (s == SIZE_MAX) break;
    }
    const auto c = rerank(beams, 2);
    EXPECT_EQ(c.repeated, best);
    std::vector<Tokens> chosen;
    for (std::size_t s = 0; s < n; ++s) chosen.push_back(beams[s][static_cast<std::size_t>(c.choice[s])].words);
    EXPECT_EQ(c.sentences, chosen);
    EXPECT_EQ(repeated_ngram_count<std::string>(concatenate(chosen), 2), best);
  }
}

TEST(Rerank, CapFallsBackToBestPerSentence) {
  std::vector<std::vector<BeamHypothesis>> beams(3, {hyp({"a", "b"}, -1), hyp({"c", "d"}, -2)});
  const auto c = rerank(beams, 2, 7);
  EXPECT_TRUE(c.fell_back);
  EXPECT_EQ(c.choice, (std::vector<int>{0, 0, 0}));
}

Vocabulary toy_vocab() {
  std::vector<std::string> words;
  for (int i = 0; i < 16; ++i) words.push_back("v" + std::to_string(i));
  return Vocabulary::from_words(words);
}

AbstractorDims toy_abs_dims() {
  AbstractorDims d;
  d.vocab = 20;
  d.embedding = 6;
  d.hidden = 8;
  return d;
}

std::vector<Tokens> random_sentences(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Tokens> out(count);
  for (auto& s : out) {
    s.resize(2 + uniform_index(rng, 8));
    for (auto& t : s) t = uniform01(rng) < 0.1 ? "oov" + std::to_string(uniform_index(rng, 3))
                                                : "v" + std::to_string(uniform_index(rng, 16));
  }
  return out;
}

TEST(AbstractorBeam, WidthOneMatchesBlockedGreedy) {
  const auto v = toy_vocab();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AbstractorModel m(toy_abs_dims(), seed);
    for (const auto& src : random_sentences(10, seed)) {
      const auto beams = abstractor_beam_search(m, v, src, 1, 0.0, 12);
      ASSERT_EQ(beams.size(), 1u);
      EXPECT_EQ(beams[0].words, greedy_decode(m, v, src, 12, true));
    }
  }
}

TEST(AbstractorBeam, NoRepeatedTrigramsNoUnk) {
  const auto v = toy_vocab();
  AbstractorModel m(toy_abs_dims(), 7);
  for (const auto& src : random_sentences(10, 8)) {
    for (const auto& h : abstractor_beam_search(m, v, src, 5, 1.0, 30)) {
      EXPECT_EQ(repeated_ngram_count<std::string>(h.words, 3), 0u);
      EXPECT_EQ(std::count(h.words.begin(), h.words.end(), v.decode(Vocabulary::kUnk)), 0);
    }
  }
}

TEST(ParallelAbstract, IdenticalForEveryWorkerCount) {
  const auto v = toy_vocab();
  AbstractorModel m(toy_abs_dims(), 11);
  const auto sents = random_sentences(40, 12);
  const auto ref = sequential_abstract(sents, m, v);
  for (int w : {1, 2, 4, 8}) EXPECT_EQ(parallel_abstract(sents, m, v, w), ref) << w;
  AbstractOptions opts;
  opts.beam = true;
  opts.beam_width = 3;
  const auto b1 = parallel_beams(sents, m, v, 1, opts);
  const auto b4 = parallel_beams(sents, m, v, 4, opts);
  ASSERT_EQ(b1.size(), b4.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    ASSERT_EQ(b1[i].size(), b4[i].size());
    for (std::size_t j = 0; j < b1[i].size(); ++j) {
      EXPECT_EQ(b1[i][j].words, b4[i][j].words);
      EXPECT_EQ(b1[i][j].log_prob, b4[i][j].log_prob);
    }
  }
}

ExtractorDims toy_ext_dims() {
  ExtractorDims d;
  d.vocab = 20;
  d.embedding = 6;
  d.filters = 3;
  d.hidden = 8;
  return d;
}

TEST(Summarize, ModesAndEdgeCases) {
  const auto v = toy_vocab();
  ExtractorModel ext(toy_ext_dims(), 3);
  AbstractorModel abs(toy_abs_dims(), 4);
  const Document doc{"d", random_sentences(6, 5)};
  SummarizeOptions opts;
  opts.use_eoe = false;
  opts.fixed_k = 2;
  opts.mode = SummaryMode::kExtractOnly;
  const auto raw = summarize(doc, ext, nullptr, v, opts);
  ASSERT_EQ(raw.indices.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(raw.sentences[i], doc.sentences[static_cast<std::size_t>(raw.indices[i])]);

  opts.mode = SummaryMode::kGreedy;
  const auto greedy = summarize(doc, ext, &abs, v, opts);
  EXPECT_EQ(greedy.indices, raw.indices);
  EXPECT_EQ(summarize(doc, ext, &abs, v, opts).sentences, greedy.sentences);

  opts.mode = SummaryMode::kRerank;
  const auto rr = summarize(doc, ext, &abs, v, opts);
  EXPECT_EQ(rr.indices, raw.indices);
  EXPECT_EQ(rr.sentences.size(), 2u);

  const auto empty = summarize(Document{"e", {}}, ext, &abs, v, opts);
  EXPECT_TRUE(empty.sentences.empty());
  EXPECT_TRUE(empty.indices.empty());

  EXPECT_EQ(parse_summary_mode("extract-only"), SummaryMode::kExtractOnly);
  EXPECT_EQ(summary_mode_name(parse_summary_mode("rerank")), "rerank");
  EXPECT_THROW(parse_summary_mode("bogus"), std::invalid_argument);
}

TEST(Throughput, ReportsIdenticalOutputs) {
  const auto v = toy_vocab();
  AbstractorModel m(toy_abs_dims(), 2);
  const auto samples = measure_throughput(random_sentences(16, 3), m, v, {1, 2}, 1);
  ASSERT_EQ(samples.size(), 2u);
  for (const auto& s : samples) {
    EXPECT_TRUE(s.identical_to_serial);
    EXPECT_GT(s.sentences_per_sec, 0.0);
  }
}

}  // namespace
}  // namespace summ
