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

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "summ/params.hpp"

namespace summ {

// Handle to a value recorded on a Graph.
struct Var {
  int index = -1;
  bool valid() const { return index >= 0; }
};

// Reverse-mode automatic differentiation tape over dense double matrices.
//
// A Graph records every operation of one forward pass. Parameters enter as
// leaves that reference the ParamSet storage without copying; backward()
// writes parameter gradients into a caller-owned GradSet, so several graphs
// may run concurrently over one read-only ParamSet.
//
// Softmax-style ops treat their input as one flat vector regardless of shape.
class Graph {
 public:
  explicit Graph(const ParamSet* params = nullptr);

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  Var input(Matrix value);
  Var scalar_input(double value);
  Var param(ParamId id);

  // Gathers rows `ids` of a (vocab x dim) table as the columns of a
  // (dim x ids.size()) matrix.
  Var embed(ParamId table, std::span<const int> ids);

  Var matmul(Var a, Var b);
  // W x + b with b broadcast across the columns of x.
  Var affine(Var w, Var x, Var b);
  Var add(Var a, Var b);
  Var add_colwise(Var m, Var col);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var log(Var a);
  Var sum(Var a);
  Var dot(Var a, Var b) { return sum(mul(a, b)); }
  Var transpose(Var a);
  Var concat_rows(std::span<const Var> parts);
  Var concat_cols(std::span<const Var> parts);
  Var slice_rows(Var a, int start, int count);
  Var col(Var a, int j);
  // Flat entry `index` as a 1x1 value.
  Var pick(Var a, int index);

  Var softmax(Var a);
  Var log_softmax(Var a);
  // Masked entries (mask[i] == false) get probability exactly 0 and
  // log-probability -inf; they receive no gradient.
  Var masked_softmax(Var a, const std::vector<bool>& mask);
  Var masked_log_softmax(Var a, const std::vector<bool>& mask);

  // relu(max over time of conv1d(x)) for x of shape (dim x len) and filters
  // w of shape (filters x width*dim). Requires len >= width. The filter sees
  // the window flattened column-major, i.e. x[:, t], x[:, t+1], ...
  Var conv_relu_maxpool(Var x, Var w, Var b, int width);

  // LSTM cell on precomputed gate pre-activations (4H x 1, order i,f,g,o)
  // and the previous cell (H x 1). Produces [h; c] as (2H x 1).
  Var lstm_cell(Var gates, Var c_prev);

  // Copies the value; nothing flows back through the result.
  Var detach(Var a);

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.index)].value(); }
  double scalar(Var v) const { return value(v)(0, 0); }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and accumulates into `grads` (which must be
  // built over the same ParamSet). The graph can be backpropagated once.
  void backward(Var loss, GradSet& grads);

 private:
  enum class Op : std::uint8_t {
    kInput, kParam, kEmbed, kMatMul, kAffine, kAdd, kAddColwise, kSub, kMul,
    kScale, kTanh, kSigmoid, kRelu, kLog, kSum, kTranspose, kConcatRows,
    kConcatCols, kSliceRows, kCol, kPick, kSoftmax, kLogSoftmax,
    kMaskedSoftmax, kMaskedLogSoftmax, kConvMaxPool, kLstmCell, kDetach,
  };

  struct Node {
    Op op = Op::kInput;
    std::array<int, 3> in{-1, -1, -1};
    int aux = 0;
    int aux2 = 0;
    double factor = 0.0;
    const Matrix* external = nullptr;  // parameter leaves
    Matrix own;
    Matrix grad;
    std::vector<int> ints;  // embed ids, concat parts, argmax, mask
    const Matrix& value() const { return external ? *external : own; }
  };

  Var push(Node node);
  Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.index)]; }
  void accumulate(int index, const Matrix& g);
  Matrix& grad_of(int index);
  void backward_node(std::size_t i, GradSet& grads);

  const ParamSet* params_;
  std::deque<Node> nodes_;
};

}  // namespace summ
