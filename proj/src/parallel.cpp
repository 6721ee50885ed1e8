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

#include "summ/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace summ {

int default_workers() { return std::max(1, omp_get_max_threads()); }

void serial_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (workers == 1 || n <= 1) {
    serial_for(n, fn);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

BatchGradient batch_gradient(const ParamSet& params, std::size_t n, int workers,
                             const ExampleLoss& loss) {
  std::vector<GradSet> grads(n, GradSet(params));
  std::vector<double> losses(n, 0.0);
  parallel_for(n, workers, [&](std::size_t i) {
    Graph g(&params);
    const Var l = loss(g, i);
    losses[i] = g.scalar(l);
    if (!std::isfinite(losses[i])) {
      throw std::runtime_error("non-finite loss for example " + std::to_string(i));
    }
    g.backward(l, grads[i]);
  });
  BatchGradient out{0.0, GradSet(params)};
  for (std::size_t i = 0; i < n; ++i) {
    out.loss_sum += losses[i];
    out.grads.add(grads[i]);
  }
  return out;
}

}  // namespace summ
