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

#include "summ/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "summ/random.hpp"

namespace summ {

namespace {

double evaluate(const ParamSet& params, const LossBuilder& loss) {
  Graph g(&params);
  return g.scalar(loss(g));
}

}  // namespace

GradCheckResult finite_difference_check(ParamSet& params, const LossBuilder& loss,
                                        double eps, std::size_t max_entries,
                                        std::uint64_t seed, double abs_floor) {
  GradSet grads(params);
  {
    Graph g(&params);
    g.backward(loss(g), grads);
  }

  std::vector<std::pair<std::size_t, Eigen::Index>> entries;
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!params[ParamId{p}].trainable) continue;
    for (Eigen::Index i = 0; i < params[ParamId{p}].value.size(); ++i) entries.emplace_back(p, i);
  }
  if (entries.size() > max_entries) {
    Rng rng(seed);
    for (std::size_t i = 0; i < max_entries; ++i) {
      std::swap(entries[i], entries[i + uniform_index(rng, entries.size() - i)]);
    }
    entries.resize(max_entries);
  }

  GradCheckResult result;
  for (const auto& [p, i] : entries) {
    double& x = params[ParamId{p}].value.data()[i];
    const double saved = x;
    x = saved + eps;
    const double up = evaluate(params, loss);
    x = saved - eps;
    const double down = evaluate(params, loss);
    x = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const Matrix* gm = grads.find(ParamId{p});
    const double analytic = gm ? gm->data()[i] : 0.0;
    const double denom = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
    const double rel = std::abs(analytic - numeric) / denom;
    ++result.entries_checked;
    if (rel > result.max_rel_error || result.worst_entry < 0) {
      result.max_rel_error = std::max(result.max_rel_error, rel);
      if (rel >= result.max_rel_error) {
        result.worst_param = params[ParamId{p}].name;
        result.worst_entry = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace summ
