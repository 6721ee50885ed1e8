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

#include <cstdint>
#include <functional>
#include <string>

#include "summ/graph.hpp"

namespace summ {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_entry = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

// Builds a scalar loss on a fresh graph over the given parameters.
using LossBuilder = std::function<Var(Graph&)>;

// Compares reverse-mode gradients against central differences
// (f(x+eps) - f(x-eps)) / 2eps for every parameter entry, or for a seeded
// random sample of `max_entries` entries when the model is larger. The
// relative error of one entry is |a - n| / max(|a|, |n|, abs_floor).
GradCheckResult finite_difference_check(ParamSet& params, const LossBuilder& loss,
                                        double eps = 1e-5,
                                        std::size_t max_entries = 10000,
                                        std::uint64_t seed = 0,
                                        double abs_floor = 1e-6);

}  // namespace summ
