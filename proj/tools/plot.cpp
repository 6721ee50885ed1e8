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

#include "plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace summ::tools {

namespace {

constexpr double kWidth = 640, kPanel = 220, kMargin = 50;

void panel(std::ostringstream& out, const std::vector<CurvePoint>& curve, double top,
           const char* label, double (*get)(const CurvePoint&), const char* color) {
  double lo = get(curve.front()), hi = lo;
  for (const auto& p : curve) {
    lo = std::min(lo, get(p));
    hi = std::max(hi, get(p));
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double x0 = curve.front().step, x1 = std::max<double>(curve.back().step, x0 + 1);
  const double w = kWidth - 2 * kMargin, h = kPanel - 2 * kMargin;
  out << "<rect x='" << kMargin << "' y='" << top + kMargin << "' width='" << w << "' height='" << h
      << "' fill='none' stroke='#888'/>\n";
  out << "<text x='" << kMargin << "' y='" << top + kMargin - 8 << "' font-size='13'>" << label << "</text>\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", hi);
  out << "<text x='4' y='" << top + kMargin + 10 << "' font-size='10'>" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3f", lo);
  out << "<text x='4' y='" << top + kMargin + h << "' font-size='10'>" << buf << "</text>\n";
  out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
  for (const auto& p : curve) {
    const double x = kMargin + (p.step - x0) / (x1 - x0) * w;
    const double y = top + kMargin + (hi - get(p)) / (hi - lo) * h;
    out << x << ',' << y << ' ';
  }
  out << "'/>\n";
  out << "<text x='" << kWidth - kMargin - 60 << "' y='" << top + kPanel - 20 << "' font-size='10'>step "
      << curve.back().step << "</text>\n";
}

}  // namespace

std::string curve_svg(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw std::invalid_argument("reward curve is empty");
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << 2 * kPanel << "'>\n";
  panel(out, curve, 0, "mean episode reward", [](const CurvePoint& p) { return p.mean_reward; }, "#1f77b4");
  panel(out, curve, kPanel, "EOE rate", [](const CurvePoint& p) { return p.eoe_rate; }, "#d62728");
  out << "</svg>\n";
  return out.str();
}

std::string curve_report(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw std::invalid_argument("reward curve is empty");
  const auto best = std::max_element(curve.begin(), curve.end(), [](const auto& a, const auto& b) {
    return a.mean_reward < b.mean_reward;
  });
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "points       %zu\n"
                "first        step %d reward %.4f eoe %.3f\n"
                "last         step %d reward %.4f eoe %.3f\n"
                "best reward  step %d reward %.4f\n"
                "change       %+.4f\n",
                curve.size(), curve.front().step, curve.front().mean_reward, curve.front().eoe_rate,
                curve.back().step, curve.back().mean_reward, curve.back().eoe_rate, best->step,
                best->mean_reward, curve.back().mean_reward - curve.front().mean_reward);
  return buf;
}

}  // namespace summ::tools
