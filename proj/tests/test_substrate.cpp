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
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "summ/checkpoint.hpp"
#include "summ/gradcheck.hpp"
#include "summ/layers.hpp"
#include "summ/optim.hpp"
#include "summ/parallel.hpp"
#include "summ/random.hpp"

namespace summ {
namespace {

// Weighted sum with fixed random weights.
Var project(Graph& g, Var v, std::uint64_t seed) {
  const Matrix& m = g.value(v);
  Rng rng(seed);
  Matrix w(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = uniform(rng, -1, 1);
  return g.sum(g.mul(v, g.input(w)));
}

struct OpFixture {
  ParamSet params;
  ParamId a, b, c, col, emb;
  OpFixture() {
    a = params.add("a", 3, 4);
    b = params.add("b", 4, 2);
    c = params.add("c", 3, 4);
    col = params.add("col", 3, 1);
    emb = params.add("emb", 6, 3, Init::kNormal);
    params.initialize(42, 0.8, 0.5);
  }
};

void expect_gradients(ParamSet& params, const LossBuilder& loss, double tol = 1e-5) {
  const auto r = finite_difference_check(params, loss, 1e-5, 10000, 0, 1e-7);
  EXPECT_LT(r.max_rel_error, tol) << r.worst_param << "[" << r.worst_entry << "] analytic "
                                  << r.worst_analytic << " numeric " << r.worst_numeric;
  EXPECT_GT(r.entries_checked, 0u);
}

TEST(Graph, ElementwiseAndLinearOps) {
  OpFixture f;
  expect_gradients(f.params, [&](Graph& g) {
    const Var a = g.param(f.a), c = g.param(f.c);
    const Var x = g.add(g.mul(g.tanh(a), g.sigmoid(c)), g.sub(g.scale(a, 0.3), c));
    const Var m = g.matmul(x, g.param(f.b));
    const Var col = g.add_colwise(g.relu(g.add(a, c)), g.param(f.col));
    return g.add(project(g, m, 1), project(g, g.transpose(col), 2));
  });
}

TEST(Graph, AffineLogAndSlicing) {
  OpFixture f;
  expect_gradients(f.params, [&](Graph& g) {
    const Var w = g.transpose(g.param(f.b));        // 2x4
    const Var x = g.transpose(g.param(f.a));        // 4x3
    const Var y = g.affine(w, x, g.slice_rows(g.param(f.col), 0, 2));
    const Var pos = g.log(g.sigmoid(y));
    const Var parts[] = {g.col(pos, 0), g.col(pos, 2)};
    const Var rows[] = {g.slice_rows(g.param(f.a), 1, 2), g.param(f.c)};
    return g.add(g.add(project(g, g.concat_cols(parts), 3), project(g, g.concat_rows(rows), 4)),
                 g.pick(pos, 5));
  });
}

TEST(Graph, SoftmaxFamily) {
  OpFixture f;
  const std::vector<bool> mask{true, false, true, true, false, true, true, true, true, false, true, true};
  expect_gradients(f.params, [&](Graph& g) {
    const Var a = g.param(f.a), c = g.param(f.c);
    Var total = project(g, g.softmax(a), 6);
    total = g.add(total, project(g, g.log_softmax(c), 7));
    total = g.add(total, project(g, g.masked_softmax(g.add(a, c), mask), 8));
    // Masked log-probabilities are -inf; pick only finite entries.
    const Var mls = g.masked_log_softmax(g.sub(a, c), mask);
    return g.add(total, g.add(g.pick(mls, 0), g.pick(mls, 11)));
  });
}

TEST(Graph, EmbedConvAndLstm) {
  ParamSet params;
  const ParamId emb = params.add("emb", 7, 3, Init::kNormal);
  const ParamId w = params.add("w", 2, 9);
  const ParamId b = params.add("b", 2, 1);
  const Lstm lstm = Lstm::create(params, "l", 3, 4);
  params.initialize(5, 0.5, 0.5);
  const std::vector<int> ids{1, 4, 4, 6, 0};
  expect_gradients(params, [&](Graph& g) {
    const Var x = g.embed(emb, ids);
    const Var pooled = g.conv_relu_maxpool(x, g.param(w), g.param(b), 3);
    LstmState s{g.input(Matrix::Zero(4, 1)), g.input(Matrix::Zero(4, 1))};
    for (int t = 0; t < 3; ++t) s = lstm.step(g, g.col(x, t), s);
    return g.add(project(g, pooled, 9), g.add(project(g, s.h, 10), project(g, s.c, 11)));
  });
}

TEST(Graph, MaskedSoftmaxZeroesMaskedSlots) {
  Graph g;
  const Var p = g.masked_softmax(g.input(Matrix::Constant(1, 3, 0.7)), {true, false, true});
  EXPECT_EQ(g.value(p)(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(g.value(p)(0, 0), 0.5);
  const Var lp = g.masked_log_softmax(g.input(Matrix::Zero(1, 3)), {false, true, true});
  EXPECT_EQ(g.value(lp)(0, 0), -std::numeric_limits<double>::infinity());
}

TEST(GradCheck, LinearMapIsExact) {
  ParamSet params;
  const ParamId w = params.add("w", 1, 5);
  params.initialize(3);
  Matrix x(5, 1);
  x << 1, -2, 0.5, 3, -1;
  const auto r = finite_difference_check(params, [&](Graph& g) { return g.matmul(g.param(w), g.input(x)); },
                                         1e-5, 10000, 0, 1e-8);
  EXPECT_LT(r.max_rel_error, 1e-8);
  EXPECT_EQ(r.entries_checked, 5u);
}

TEST(GradCheck, SoftmaxCrossEntropyThreeClasses) {
  ParamSet params;
  const ParamId w = params.add("w", 3, 4);
  params.initialize(8, 0.5);
  Matrix x(4, 1);
  x << 0.3, -1.2, 0.8, 2.0;
  const auto r = finite_difference_check(
      params, [&](Graph& g) { return g.scale(g.pick(g.log_softmax(g.matmul(g.param(w), g.input(x))), 2), -1.0); },
      1e-4);
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(GradCheck, DetachedPathContributesNothing) {
  ParamSet params;
  const ParamId w = params.add("w", 2, 2);
  params.initialize(4);
  Graph g(&params);
  const Var loss = g.sum(g.mul(g.detach(g.param(w)), g.param(w)));
  GradSet grads(params);
  g.backward(loss, grads);
  // d/dw sum(stop(w) * w) = stop(w).
  EXPECT_TRUE(grads.at(w).isApprox(params[w].value));
  Graph g2(&params);
  GradSet none(params);
  g2.backward(g2.sum(g2.detach(g2.param(w))), none);
  EXPECT_TRUE(!none.touched(w) || none.at(w).isZero());
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamSet params;
  const ParamId w = params.add("w", 2, 3);
  params.initialize(1);
  const Matrix before = params[w].value;
  auto state = OptimState::for_params(params, 1e-3);
  GradSet grads(params);
  grads.at(w).setZero();
  adam_step(params, grads, state);
  EXPECT_EQ(params[w].value, before);
  EXPECT_EQ(state.step, 1);
}

TEST(Adam, FirstStepMagnitudeIsLearningRate) {
  ParamSet params;
  const ParamId w = params.add("w", 1, 1, Init::kZero);
  params.initialize(1);
  auto state = OptimState::for_params(params, 1e-3);
  GradSet grads(params);
  grads.at(w)(0, 0) = 1.0;
  adam_step(params, grads, state);
  // m_hat = 1, v_hat = 1: step = lr * 1 / (1 + eps).
  EXPECT_NEAR(params[w].value(0, 0), -1e-3 / (1.0 + 1e-8), 1e-15);
  double prev = params[w].value(0, 0);
  for (int i = 0; i < 20; ++i) {
    adam_step(params, grads, state);
    EXPECT_LT(params[w].value(0, 0), prev);
    prev = params[w].value(0, 0);
  }
}

TEST(Adam, NonFiniteGradientNamesParameter) {
  ParamSet params;
  const ParamId w = params.add("encoder/w", 1, 2);
  params.initialize(1);
  const Matrix before = params[w].value;
  auto state = OptimState::for_params(params, 1e-3);
  GradSet grads(params);
  grads.at(w)(0, 1) = std::nan("");
  try {
    adam_step(params, grads, state);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("encoder/w"), std::string::npos);
  }
  EXPECT_EQ(params[w].value, before);
}

TEST(Clip, RescalesAboveThreshold) {
  ParamSet params;
  const ParamId a = params.add("a", 1, 2), b = params.add("b", 2, 1);
  GradSet grads(params);
  grads.at(a) << 2.0, 0.0;
  grads.at(b) << 2.0, 2.0 * std::sqrt(2.0);  // global norm sqrt(4 + 4 + 8) = 4
  EXPECT_DOUBLE_EQ(clip_gradients(grads, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(grads.at(a)(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(grads.at(b)(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(grads.at(b)(1, 0), std::sqrt(2.0));

  GradSet small(params);
  small.at(a) << 0.6, 0.8;
  clip_gradients(small, 2.0);
  EXPECT_DOUBLE_EQ(small.at(a)(0, 1), 0.8);
  GradSet zero(params);
  zero.at(a).setZero();
  EXPECT_EQ(clip_gradients(zero, 2.0), 0.0);
  EXPECT_TRUE(zero.at(a).isZero());
}

TEST(Plateau, HalvesOnlyWhenNotImproving) {
  OptimState s;
  s.lr = 1.0;
  const std::vector<double> improving{3.0, 2.5}, flat{2.5, 2.6};
  EXPECT_FALSE(halve_lr_on_plateau(s, improving));
  EXPECT_EQ(s.lr, 1.0);
  EXPECT_TRUE(halve_lr_on_plateau(s, flat));
  EXPECT_EQ(s.lr, 0.5);

  OptimState t;
  t.lr = 1.0;
  PlateauSchedule sched(3);
  EXPECT_TRUE(sched.record(t, 2.0));
  EXPECT_TRUE(sched.record(t, 2.1));
  EXPECT_TRUE(sched.record(t, 2.2));
  EXPECT_EQ(t.lr, 0.25);
  EXPECT_FALSE(sched.record(t, 2.3));
  EXPECT_EQ(t.lr, 0.125);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ParamSet params;
  params.add("x", 3, 2);
  params.add("y", 1, 4, Init::kNormal);
  params.initialize(77);
  auto state = OptimState::for_params(params, 5e-4);
  GradSet grads(params);
  grads.at(ParamId{0}).setConstant(0.25);
  adam_step(params, grads, state);

  const auto path = std::filesystem::temp_directory_path() / "summ_test.ckpt";
  Checkpoint::capture("test", "abc", {{"k", 1}}, params, &state).write(path);
  const auto back = Checkpoint::read(path);
  EXPECT_EQ(back.kind, "test");
  EXPECT_EQ(back.config_hash, "abc");
  EXPECT_EQ(back.meta["k"], 1);
  ASSERT_TRUE(back.optimizer.has_value());
  EXPECT_EQ(back.optimizer->step, 1);
  EXPECT_EQ(back.optimizer->first_moment[0], state.first_moment[0]);

  ParamSet other;
  other.add("x", 3, 2);
  other.add("y", 1, 4);
  back.restore(other);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(other.all()[i].value, params.all()[i].value);

  ParamSet wrong;
  wrong.add("x", 2, 2);
  EXPECT_THROW(back.restore(wrong), std::runtime_error);
}

TEST(Parallel, BatchGradientIndependentOfWorkers) {
  ParamSet params;
  const ParamId w = params.add("w", 4, 4);
  params.initialize(2);
  auto loss = [&](Graph& g, std::size_t i) {
    Matrix x = Matrix::Constant(4, 1, 0.1 * static_cast<double>(i + 1));
    return g.sum(g.tanh(g.matmul(g.param(w), g.input(x))));
  };
  const auto ref = batch_gradient(params, 37, 1, loss);
  for (int workers : {2, 4, 8}) {
    const auto got = batch_gradient(params, 37, workers, loss);
    EXPECT_EQ(got.loss_sum, ref.loss_sum);
    EXPECT_EQ(*got.grads.find(w), *ref.grads.find(w));
  }
}

TEST(Parallel, EveryIndexOnceAndLowestExceptionWins) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 7");
  }
}

TEST(ParamSet, RejectsDuplicateNamesAndFindsNonFinite) {
  ParamSet params;
  const ParamId w = params.add("w", 2, 2);
  EXPECT_THROW(params.add("w", 1, 1), std::invalid_argument);
  params.initialize(1);
  EXPECT_NO_THROW(params.check_finite());
  params[w].value(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(params.check_finite(), std::runtime_error);
}

}  // namespace
}  // namespace summ
