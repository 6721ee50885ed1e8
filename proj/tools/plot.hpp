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

#include <string>
#include <vector>

#include "summ/rl.hpp"

namespace summ::tools {

// Two-panel SVG: mean reward and EOE rate against the update step.
std::string curve_svg(const std::vector<CurvePoint>& curve);
// Plain-text summary: first/last/best reward, EOE rate at start and end.
std::string curve_report(const std::vector<CurvePoint>& curve);

}  // namespace summ::tools
