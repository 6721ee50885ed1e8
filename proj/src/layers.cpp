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

#include "summ/layers.hpp"

namespace summ {

Lstm Lstm::create(ParamSet& params, const std::string& prefix, int input, int hidden) {
  Lstm l;
  l.input = input;
  l.hidden = hidden;
  l.weight = params.add(prefix + ".weight", 4 * hidden, input + hidden);
  l.bias = params.add(prefix + ".bias", 4 * hidden, 1);
  return l;
}

LstmState Lstm::step(Graph& g, Var x, const LstmState& prev) const {
  const Var parts[] = {x, prev.h};
  const Var xh = g.concat_rows(parts);
  const Var gates = g.affine(g.param(weight), xh, g.param(bias));
  const Var hc = g.lstm_cell(gates, prev.c);
  return {g.slice_rows(hc, 0, hidden), g.slice_rows(hc, hidden, hidden)};
}

InitialState InitialState::create(ParamSet& params, const std::string& prefix, int hidden) {
  return {params.add(prefix + ".h0", hidden, 1), params.add(prefix + ".c0", hidden, 1)};
}

BiLstmOutput run_bidirectional(Graph& g, const Lstm& fwd, const Lstm& bwd,
                               const std::vector<Var>& inputs,
                               const LstmState& fwd_init, const LstmState& bwd_init) {
  const std::size_t n = inputs.size();
  std::vector<Var> f(n), b(n);
  LstmState s = fwd_init;
  for (std::size_t j = 0; j < n; ++j) {
    s = fwd.step(g, inputs[j], s);
    f[j] = s.h;
  }
  BiLstmOutput out;
  out.forward_final = s;
  s = bwd_init;
  for (std::size_t j = n; j-- > 0;) {
    s = bwd.step(g, inputs[j], s);
    b[j] = s.h;
  }
  out.backward_final = s;
  std::vector<Var> cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Var pair[] = {f[j], b[j]};
    cols[j] = g.concat_rows(pair);
  }
  out.states = g.concat_cols(cols);
  return out;
}

}  // namespace summ
