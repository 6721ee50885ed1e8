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

#include "summ/params.hpp"

#include <cmath>
#include <stdexcept>

#include "summ/random.hpp"

namespace summ {

ParamId ParamSet::add(const std::string& name, Eigen::Index rows,
                      Eigen::Index cols, Init init) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("parameter " + name + " has an empty shape");
  index_[name] = params_.size();
  params_.push_back({name, Matrix::Zero(rows, cols), init, true});
  return ParamId{params_.size() - 1};
}

void ParamSet::initialize(std::uint64_t seed, double uniform_range,
                          double normal_std) {
  Rng rng(seed);
  for (auto& p : params_) {
    switch (p.init) {
      case Init::kUniform:
        for (Eigen::Index i = 0; i < p.value.size(); ++i)
          p.value.data()[i] = uniform(rng, -uniform_range, uniform_range);
        break;
      case Init::kNormal:
        for (Eigen::Index i = 0; i < p.value.size(); ++i)
          p.value.data()[i] = normal(rng, normal_std);
        break;
      case Init::kZero:
        p.value.setZero();
        break;
    }
  }
}

std::optional<ParamId> ParamSet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return ParamId{it->second};
}

ParamId ParamSet::at(const std::string& name) const {
  auto id = find(name);
  if (!id) throw std::out_of_range("no parameter named " + name);
  return *id;
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamSet::check_finite() const {
  for (const auto& p : params_) {
    if (!p.value.allFinite()) throw std::runtime_error("parameter " + p.name + " is not finite");
  }
}

GradSet::GradSet(const ParamSet& params)
    : params_(&params), grads_(params.size()) {}

Matrix& GradSet::at(ParamId id) {
  Matrix& g = grads_.at(id.index);
  if (g.size() == 0) {
    const Matrix& v = (*params_)[id].value;
    g = Matrix::Zero(v.rows(), v.cols());
  }
  return g;
}

const Matrix* GradSet::find(ParamId id) const {
  const Matrix& g = grads_.at(id.index);
  return g.size() == 0 ? nullptr : &g;
}

void GradSet::add(const GradSet& other) {
  if (other.grads_.size() != grads_.size()) throw std::invalid_argument("gradient sets differ in size");
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    if (other.grads_[i].size() == 0) continue;
    if (grads_[i].size() == 0) {
      grads_[i] = other.grads_[i];
    } else {
      grads_[i] += other.grads_[i];
    }
  }
}

void GradSet::scale(double factor) {
  for (auto& g : grads_)
    if (g.size()) g *= factor;
}

double GradSet::global_norm() const {
  double sq = 0.0;
  for (const auto& g : grads_)
    if (g.size()) sq += g.squaredNorm();
  return std::sqrt(sq);
}

void GradSet::zero() {
  for (auto& g : grads_) g.resize(0, 0);
}

}  // namespace summ
