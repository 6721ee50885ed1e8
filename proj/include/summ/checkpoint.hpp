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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "summ/optim.hpp"
#include "summ/params.hpp"

namespace summ {

// On-disk layout (all integers little-endian):
//
//   bytes 0..7   magic "SUMMCKPT"
//   u32          format version (1)
//   u64          header length in bytes
//   header       JSON object with sorted keys:
//                  kind, config_hash, meta,
//                  params: [{name, rows, cols, trainable}] in storage order,
//                  optimizer: null | {step, lr, beta1, beta2, epsilon}
//   payload      IEEE-754 binary64 little-endian values: every parameter in
//                header order (column-major), then, when an optimizer is
//                stored, all first moments followed by all second moments
//                in the same order.
struct Checkpoint {
  std::string kind;
  std::string config_hash;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<Parameter> params;
  std::optional<OptimState> optimizer;

  static Checkpoint capture(std::string kind, std::string config_hash,
                            nlohmann::json meta, const ParamSet& params,
                            const OptimState* optimizer = nullptr);
  static Checkpoint read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;

  // Copies values into `target` by name; every parameter of `target` must be
  // present with the same shape.
  void restore(ParamSet& target) const;
};

}  // namespace summ
