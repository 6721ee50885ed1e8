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

#include "summ/metrics.hpp"

#include <set>

namespace summ {

RougeScore make_rouge(double matches, double hyp_total, double ref_total) {
  RougeScore s;
  if (hyp_total <= 0.0 || ref_total <= 0.0) return s;
  s.precision = matches / hyp_total;
  s.recall = matches / ref_total;
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

Tokens concatenate(const std::vector<Tokens>& sentences) {
  Tokens out;
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

RougeScore rouge_summary(const std::vector<Tokens>& hyp_sents,
                         const std::vector<Tokens>& ref_sents, RougeKind kind) {
  const Tokens hyp = concatenate(hyp_sents);
  const Tokens ref = concatenate(ref_sents);
  switch (kind) {
    case RougeKind::kRouge1: return rouge_n(hyp, ref, 1);
    case RougeKind::kRouge2: return rouge_n(hyp, ref, 2);
    case RougeKind::kRougeL: return rouge_l(hyp, ref);
  }
  return {};
}

double novel_ngram_ratio(const std::vector<Tokens>& summary_sents,
                         const Document& document, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngram order must be >= 1");
  std::set<std::vector<std::string>> doc_grams;
  for (const auto& s : document.sentences) {
    for (const auto& [gram, count] : ngram_counts<std::string>(s, n)) doc_grams.insert(gram);
  }
  std::set<std::vector<std::string>> summary_grams;
  for (const auto& s : summary_sents) {
    for (const auto& [gram, count] : ngram_counts<std::string>(s, n)) summary_grams.insert(gram);
  }
  if (summary_grams.empty()) return 0.0;
  std::size_t novel = 0;
  for (const auto& g : summary_grams) novel += doc_grams.count(g) ? 0 : 1;
  return static_cast<double>(novel) / static_cast<double>(summary_grams.size());
}

std::string simple_stem(const std::string& w) {
  auto ends = [&](const char* suf, std::size_t min_stem) {
    const std::string s(suf);
    return w.size() >= s.size() + min_stem && w.compare(w.size() - s.size(), s.size(), s) == 0;
  };
  if (ends("ing", 3)) return w.substr(0, w.size() - 3);
  if (ends("ed", 3)) return w.substr(0, w.size() - 2);
  if (ends("ly", 3)) return w.substr(0, w.size() - 2);
  if (ends("es", 3)) return w.substr(0, w.size() - 2);
  if (ends("s", 3) && !ends("ss", 2)) return w.substr(0, w.size() - 1);
  return w;
}

Tokens stem_tokens(const Tokens& tokens) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(simple_stem(t));
  return out;
}

}  // namespace summ
