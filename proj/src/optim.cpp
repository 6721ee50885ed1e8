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

#include "summ/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace summ {

OptimState OptimState::for_params(const ParamSet& params, double lr) {
  OptimState s;
  s.lr = lr;
  for (const auto& p : params.all()) {
    s.first_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    s.second_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
  return s;
}

void adam_step(ParamSet& params, const GradSet& grads, OptimState& state) {
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("optimizer state does not match the parameter set");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix* g = grads.find(ParamId{i});
    if (!g) continue;
    const Parameter& p = params[ParamId{i}];
    if (g->rows() != p.value.rows() || g->cols() != p.value.cols()) {
      throw std::invalid_argument("gradient shape mismatch for " + p.name);
    }
    if (!g->allFinite()) throw std::runtime_error("non-finite gradient for parameter " + p.name);
  }

  ++state.step;
  const auto& h = state.hyper;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[ParamId{i}];
    if (!p.trainable) continue;
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    const Matrix* g = grads.find(ParamId{i});
    if (g) {
      m = h.beta1 * m + (1.0 - h.beta1) * *g;
      v = h.beta2 * v + (1.0 - h.beta2) * g->cwiseAbs2();
    } else {
      m *= h.beta1;
      v *= h.beta2;
    }
    p.value.array() -= state.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + h.epsilon);
  }
}

double clip_gradients(GradSet& grads, double max_norm) {
  if (max_norm <= 0.0) throw std::invalid_argument("max_norm must be positive");
  const double norm = grads.global_norm();
  if (norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

bool halve_lr_on_plateau(OptimState& state, std::span<const double> val_history) {
  if (val_history.size() < 2) return false;
  const double latest = val_history.back();
  const double best = *std::min_element(val_history.begin(), val_history.end() - 1);
  if (latest < best) return false;
  state.lr *= 0.5;
  return true;
}

bool PlateauSchedule::record(OptimState& state, double val_loss) {
  history_.push_back(val_loss);
  const bool halved = halve_lr_on_plateau(state, history_);
  improved_last_ = !halved;
  if (halved) ++halvings_;
  return halvings_ < max_halvings_;
}

}  // namespace summ
