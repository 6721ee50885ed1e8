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
#include <span>
#include <vector>

#include "summ/params.hpp"

namespace summ {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;
  double lr = 1e-3;
  AdamHyper hyper;

  static OptimState for_params(const ParamSet& params, double lr);
};

// One bias-corrected Adam update of every trainable parameter. Parameters
// absent from `grads` see a zero gradient. Throws naming the parameter if a
// gradient is not finite; nothing is modified in that case.
void adam_step(ParamSet& params, const GradSet& grads, OptimState& state);

// Rescales all gradients by max_norm / norm when the global 2-norm exceeds
// max_norm. Returns the norm before clipping.
double clip_gradients(GradSet& grads, double max_norm);

// Halves lr when the latest validation loss is not lower than the best
// earlier one. Returns true when the rate was halved.
bool halve_lr_on_plateau(OptimState& state, std::span<const double> val_history);

// Plateau-halving schedule with early stopping after a fixed number of
// halvings.
class PlateauSchedule {
 public:
  explicit PlateauSchedule(int max_halvings = 3) : max_halvings_(max_halvings) {}

  // Records a validation loss, halving lr on a plateau. Returns false once
  // training should stop.
  bool record(OptimState& state, double val_loss);
  bool improved_last() const { return improved_last_; }
  const std::vector<double>& history() const { return history_; }

 private:
  int max_halvings_;
  int halvings_ = 0;
  bool improved_last_ = false;
  std::vector<double> history_;
};

}  // namespace summ
