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

#pragma once

#include <span>
#include <vector>

#include "summ/extractor.hpp"

namespace summ {

// ff-ext: the hierarchical encoder followed by independent per-sentence
// binary classifiers conditioned on a document vector
//   x = tanh(W_d mean_j(h_j) + b_d)
//   P(d_j = 1) = sigmoid(W_c h_j + h_j^T W_s x + b).
class FFExtractorModel {
 public:
  explicit FFExtractorModel(const ExtractorDims& dims, std::uint64_t seed = 1);

  const ExtractorDims& dims() const { return dims_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const HierarchicalEncoder& encoder() const { return encoder_; }

  // Selection logits (1 x n) given context vectors (2H x n).
  Var logits(Graph& g, Var sentence_states) const;

 private:
  ExtractorDims dims_;
  ParamSet params_;
  HierarchicalEncoder encoder_;
  ParamId doc_w_, doc_b_, content_w_, salience_w_, bias_;
};

std::vector<double> ff_ext_forward(const FFExtractorModel& model, const SentenceIds& doc);

// Sum over sentences of binary cross entropy against the label set; a
// sentence matched by several summary sentences counts once.
Var ff_ext_loss(Graph& g, const FFExtractorModel& model, const SentenceIds& doc,
                std::span<const int> labels);

// Top-k by probability (ties to the lower index), returned in document order.
std::vector<int> ff_ext_select(std::span<const double> probs, int k);

}  // namespace summ
