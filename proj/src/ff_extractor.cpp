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

#include "summ/ff_extractor.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace summ {

FFExtractorModel::FFExtractorModel(const ExtractorDims& dims, std::uint64_t seed)
    : dims_(dims), encoder_(HierarchicalEncoder::create(params_, dims)) {
  const int ctx = dims.context_dim();
  doc_w_ = params_.add("ff.doc_w", ctx, ctx);
  doc_b_ = params_.add("ff.doc_b", ctx, 1);
  content_w_ = params_.add("ff.content_w", 1, ctx);
  salience_w_ = params_.add("ff.salience_w", ctx, ctx);
  bias_ = params_.add("ff.bias", 1, 1);
  params_.initialize(seed);
}

Var FFExtractorModel::logits(Graph& g, Var h) const {
  const auto n = g.value(h).cols();
  const Var mean = g.matmul(h, g.input(Matrix::Constant(n, 1, 1.0 / static_cast<double>(n))));
  const Var doc = g.tanh(g.affine(g.param(doc_w_), mean, g.param(doc_b_)));
  const Var q = g.matmul(g.param(salience_w_), doc);
  const Var content = g.matmul(g.param(content_w_), h);
  const Var salience = g.matmul(g.transpose(q), h);
  const Var b = g.matmul(g.param(bias_), g.input(Matrix::Ones(1, n)));
  return g.add(g.add(content, salience), b);
}

std::vector<double> ff_ext_forward(const FFExtractorModel& model, const SentenceIds& doc) {
  if (doc.empty()) throw std::invalid_argument("ff-ext needs at least one sentence");
  Graph g(&model.params());
  const Var p = g.sigmoid(model.logits(g, model.encoder().encode(g, doc)));
  const Matrix& v = g.value(p);
  return {v.data(), v.data() + v.size()};
}

Var ff_ext_loss(Graph& g, const FFExtractorModel& model, const SentenceIds& doc,
                std::span<const int> labels) {
  const int n = static_cast<int>(doc.size());
  const std::set<int> positive(labels.begin(), labels.end());
  Matrix y = Matrix::Zero(1, n);
  for (int j : positive) {
    if (j < 0 || j >= n) throw std::out_of_range("ff-ext label out of range");
    y(0, j) = 1.0;
  }
  const Var s = model.logits(g, model.encoder().encode(g, doc));
  const Var log_p = g.log(g.sigmoid(s));
  const Var log_not_p = g.log(g.sigmoid(g.scale(s, -1.0)));
  const Var yv = g.input(y);
  const Var not_y = g.input(Matrix::Ones(1, n) - y);
  return g.scale(g.add(g.dot(yv, log_p), g.dot(not_y, log_not_p)), -1.0);
}

std::vector<int> ff_ext_select(std::span<const double> probs, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<int> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)]; });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(k)));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace summ
