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

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "summ/graph.hpp"

namespace summ {

// Number of workers used when a caller passes 0.
int default_workers();

// Calls fn(i) for every i in [0, n) on up to `workers` OpenMP threads.
// Each index is handled exactly once; the first exception (lowest index) is
// rethrown after the loop. workers == 1 runs inline on the calling thread.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Serial reference with the same contract.
void serial_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Ordered map: out[i] = fn(i).
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int workers, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

struct BatchGradient {
  double loss_sum = 0.0;
  GradSet grads;
};

// Builds example i's scalar loss on a private graph, backpropagates into a
// private GradSet, then sums losses and gradients in index order.
using ExampleLoss = std::function<Var(Graph&, std::size_t)>;
BatchGradient batch_gradient(const ParamSet& params, std::size_t n, int workers,
                             const ExampleLoss& loss);

}  // namespace summ
