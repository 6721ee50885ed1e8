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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace summ {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ParamId {
  std::size_t index = 0;
  friend bool operator==(ParamId a, ParamId b) { return a.index == b.index; }
};

enum class Init {
  kUniform,  // U(-range, range)
  kNormal,   // N(0, std), used for embeddings
  kZero,
};

struct Parameter {
  std::string name;
  Matrix value;
  Init init = Init::kUniform;
  bool trainable = true;
};

// Named dense parameter arrays. Names are unique and shapes never change
// after registration.
class ParamSet {
 public:
  ParamId add(const std::string& name, Eigen::Index rows, Eigen::Index cols,
              Init init = Init::kUniform);

  // Re-initializes every parameter in registration order from one seeded
  // stream.
  void initialize(std::uint64_t seed, double uniform_range = 0.1,
                  double normal_std = 0.1);

  Parameter& operator[](ParamId id) { return params_[id.index]; }
  const Parameter& operator[](ParamId id) const { return params_[id.index]; }
  std::optional<ParamId> find(const std::string& name) const;
  ParamId at(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t num_values() const;
  const std::vector<Parameter>& all() const { return params_; }

  // Throws naming the first parameter holding a NaN or infinity.
  void check_finite() const;

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Gradient accumulators aligned with a ParamSet. Entries are allocated on
// first touch.
class GradSet {
 public:
  GradSet() = default;
  explicit GradSet(const ParamSet& params);

  Matrix& at(ParamId id);
  const Matrix* find(ParamId id) const;
  bool touched(ParamId id) const { return grads_[id.index].size() != 0; }

  void add(const GradSet& other);
  void scale(double factor);
  double global_norm() const;
  void zero();
  std::size_t size() const { return grads_.size(); }

 private:
  const ParamSet* params_ = nullptr;
  std::vector<Matrix> grads_;
};

}  // namespace summ
