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

#include <string>
#include <vector>

#include "summ/graph.hpp"

namespace summ {

struct LstmState {
  Var h;
  Var c;
};

// Single LSTM layer; one weight matrix over [x; h_prev].
struct Lstm {
  ParamId weight;  // (4H x (input + H))
  ParamId bias;    // (4H x 1)
  int input = 0;
  int hidden = 0;

  static Lstm create(ParamSet& params, const std::string& prefix, int input, int hidden);
  LstmState step(Graph& g, Var x, const LstmState& prev) const;
};

// Learned initial (h, c).
struct InitialState {
  ParamId h0;
  ParamId c0;

  static InitialState create(ParamSet& params, const std::string& prefix, int hidden);
  LstmState on(Graph& g) const { return {g.param(h0), g.param(c0)}; }
};

struct BiLstmOutput {
  Var states;  // (2H x n): column j = [forward_j; backward_j]
  LstmState forward_final;
  LstmState backward_final;
};

// Runs `fwd` left to right and `bwd` right to left over the columns of
// `inputs` (one column per position).
BiLstmOutput run_bidirectional(Graph& g, const Lstm& fwd, const Lstm& bwd,
                               const std::vector<Var>& inputs,
                               const LstmState& fwd_init, const LstmState& bwd_init);

}  // namespace summ
