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

#include <cmath>

#include "summ/abstractor.hpp"
#include "summ/gradcheck.hpp"
#include "summ/optim.hpp"
#include "summ/random.hpp"

namespace summ {
namespace {

Vocabulary tiny_vocab() {
  std::vector<std::string> words;
  for (int i = 0; i < 16; ++i) words.push_back("v" + std::to_string(i));
  return Vocabulary::from_words(words);  // 16 + 4 reserved = 20
}

AbstractorDims tiny_dims() {
  AbstractorDims d;
  d.vocab = 20;
  d.embedding = 6;
  d.hidden = 8;
  return d;
}

void zero_all(ParamSet& params) {
  for (std::size_t i = 0; i < params.size(); ++i) params[ParamId{i}].value.setZero();
}

void set_copy_bias(AbstractorModel& m, double b) {
  m.params()[m.copy_bias()].value.setConstant(b);
  for (const char* n : {"abs.copy.context", "abs.copy.state", "abs.copy.input"}) {
    if (const auto id = m.params().find(n)) m.params()[*id].value.setZero();
  }
}

struct StepResult {
  Vector ext;
  Vector attention;
  double p_copy;
};

StepResult first_step(const AbstractorModel& m, const Vocabulary& v, const SourceSentence& src) {
  Graph g(&m.params());
  const auto enc = m.encode(g, src);
  const auto step = m.decode_step(g, enc, m.initial_state(g, enc), Vocabulary::kStart);
  return {extended_distribution(g, step, src), g.value(step.attention), g.scalar(step.p_copy)};
}

const Tokens kSource{"v3", "zeta", "v5", "zeta", "omega", "v3"};

TEST(Attention, SingletonAndZeroMatrix) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 2);
  const auto one = first_step(m, v, SourceSentence::build(v, {"v1"}));
  EXPECT_DOUBLE_EQ(one.attention(0), 1.0);
  m.params()[m.params().at("abs.attn")].value.setZero();
  const auto flat = first_step(m, v, SourceSentence::build(v, kSource));
  for (Eigen::Index i = 0; i < flat.attention.size(); ++i) EXPECT_NEAR(flat.attention(i), 1.0 / 6.0, 1e-15);
}

TEST(CopyGate, ForcedOffIsGenerationOnly) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 2);
  set_copy_bias(m, -1e4);
  const auto src = SourceSentence::build(v, kSource);
  Graph g(&m.params());
  const auto enc = m.encode(g, src);
  const auto step = m.decode_step(g, enc, m.initial_state(g, enc), Vocabulary::kStart);
  const Vector ext = extended_distribution(g, step, src);
  EXPECT_EQ(g.scalar(step.p_copy), 0.0);
  const Matrix& gen = g.value(step.generation);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(ext(i), gen(i));
  for (int i = 20; i < src.extended_size(); ++i) EXPECT_EQ(ext(i), 0.0);
}

TEST(CopyGate, ForcedOnIsSupportedOnSource) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 2);
  set_copy_bias(m, 1e4);
  const auto src = SourceSentence::build(v, kSource);
  const auto r = first_step(m, v, src);
  EXPECT_EQ(r.p_copy, 1.0);
  Vector expect = Vector::Zero(src.extended_size());
  for (std::size_t i = 0; i < kSource.size(); ++i) expect(src.extended_ids[i]) += r.attention(static_cast<Eigen::Index>(i));
  EXPECT_TRUE(r.ext.isApprox(expect, 1e-14));
}

TEST(CopyGate, ZeroParametersGiveHalf) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 2);
  zero_all(m.params());
  EXPECT_EQ(first_step(m, v, SourceSentence::build(v, kSource)).p_copy, 0.5);
}

TEST(ExtendedDistribution, NormalizedWithCopyConservation) {
  const auto v = tiny_vocab();
  const auto src = SourceSentence::build(v, kSource);
  ASSERT_EQ(src.oov_words, (std::vector<std::string>{"zeta", "omega"}));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    AbstractorModel m(tiny_dims(), seed);
    Graph g(&m.params());
    const auto enc = m.encode(g, src);
    const auto step = m.decode_step(g, enc, m.initial_state(g, enc), Vocabulary::kStart);
    const Vector ext = extended_distribution(g, step, src);
    const double pc = g.scalar(step.p_copy);
    const Vector att = g.value(step.attention);
    EXPECT_NEAR(ext.sum(), 1.0, 1e-9);
    EXPECT_GE(ext.minCoeff(), 0.0);
    EXPECT_NEAR(g.value(step.generation).sum() * (1 - pc), 1 - pc, 1e-9);
    EXPECT_NEAR(att.sum() * pc, pc, 1e-9);
    // "zeta" at positions 1 and 3, "omega" at 4.
    EXPECT_NEAR(ext(20), pc * (att(1) + att(3)), 1e-15);
    EXPECT_NEAR(ext(21), pc * att(4), 1e-15);
  }
}

TEST(MlLoss, ZeroParametersMatchClosedForm) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 2);
  zero_all(m.params());
  // Generation is uniform over 20 ids, attention uniform over 6 positions
  // and p_copy = 0.5 at every step.
  const SentencePair pair{kSource, {"v3", "omega", "v9"}};
  auto p = [](double in_source) { return 0.5 / 20.0 + 0.5 * in_source / 6.0; };
  const double expect = -(std::log(p(2)) + std::log(0.5 * 1.0 / 6.0) + std::log(p(0)) + std::log(p(0)));
  Graph g(&m.params());
  int count = 0;
  EXPECT_NEAR(g.scalar(abstractor_nll(g, m, v, pair, count)), expect, 1e-12);
  EXPECT_EQ(count, 4);
  Graph g2(&m.params());
  const std::vector<SentencePair> pairs{pair};
  EXPECT_NEAR(g2.scalar(abstractor_ml_loss(g2, m, v, pairs)), expect / 4.0, 1e-12);
}

TEST(MlLoss, PassesGradientCheck) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 3);
  const std::vector<SentencePair> pairs{{kSource, {"v3", "zeta", "v7"}}, {{"v1", "v2"}, {"v2", "unknown"}}};
  const auto r = finite_difference_check(m.params(), [&](Graph& g) { return abstractor_ml_loss(g, m, v, pairs); });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param;
}

TEST(MlLoss, DecreasesWhenOverfitting) {
  const auto v = tiny_vocab();
  AbstractorModel m(tiny_dims(), 4);
  std::vector<SentencePair> pairs;
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    Tokens src;
    for (int k = 0; k < 5; ++k) src.push_back("v" + std::to_string(uniform_index(rng, 16)));
    pairs.push_back({src, {src[0], src[2], src[4]}});
  }
  auto state = OptimState::for_params(m.params(), 1e-2);
  double first = 0, last = 0;
  for (int step = 0; step < 50; ++step) {
    Graph g(&m.params());
    const Var loss = abstractor_ml_loss(g, m, v, pairs);
    (step == 0 ? first : last) = g.scalar(loss);
    GradSet grads(m.params());
    g.backward(loss, grads);
    adam_step(m.params(), grads, state);
  }
  EXPECT_LT(last, first);
}

TEST(GreedyDecode, NoUnkBoundedAndDeterministic) {
  const auto v = tiny_vocab();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    AbstractorModel m(tiny_dims(), seed);
    // Favor UNK in the generation distribution so the replacement rule fires.
    m.params()[m.embedding()].value.row(Vocabulary::kUnk).setConstant(2.0);
    const Tokens a = greedy_decode(m, v, kSource);
    EXPECT_EQ(a, greedy_decode(m, v, kSource));
    EXPECT_LE(a.size(), 30u);
    for (const auto& t : a) EXPECT_NE(t, v.decode(Vocabulary::kUnk));
    EXPECT_LE(greedy_decode(m, v, kSource, 4).size(), 4u);
  }
}

TEST(SourceSentence, ExtendedIds) {
  const auto v = tiny_vocab();
  const auto src = SourceSentence::build(v, kSource);
  EXPECT_EQ(src.extended_ids, (TokenIds{v.encode("v3"), 20, v.encode("v5"), 20, 21, v.encode("v3")}));
  EXPECT_EQ(src.input_ids[1], Vocabulary::kUnk);
  EXPECT_EQ(src.target_id(v, "omega"), 21);
  EXPECT_EQ(src.target_id(v, "nowhere"), Vocabulary::kUnk);
  EXPECT_EQ(src.word(v, 20), "zeta");
}

}  // namespace
}  // namespace summ
