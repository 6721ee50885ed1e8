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

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "summ/corpus.hpp"

namespace summ {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge(double matches, double hyp_total, double ref_total);

template <class T>
using NgramCounts = std::map<std::vector<T>, int>;

template <class T>
NgramCounts<T> ngram_counts(std::span<const T> tokens, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngram order must be >= 1");
  NgramCounts<T> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<T>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

// Clipped n-gram overlap. Either side without n-grams scores 0.
template <class T>
RougeScore rouge_n(std::span<const T> hyp, std::span<const T> ref,
                   std::size_t n) {
  const auto hyp_counts = ngram_counts(hyp, n);
  const auto ref_counts = ngram_counts(ref, n);
  int matches = 0;
  for (const auto& [gram, count] : hyp_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) matches += std::min(count, it->second);
  }
  const std::size_t hyp_total = hyp.size() >= n ? hyp.size() - n + 1 : 0;
  const std::size_t ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
  return make_rouge(matches, static_cast<double>(hyp_total),
                    static_cast<double>(ref_total));
}

template <class T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <class T>
RougeScore rouge_l(std::span<const T> hyp, std::span<const T> ref) {
  const auto lcs = lcs_length(hyp, ref);
  return make_rouge(static_cast<double>(lcs), static_cast<double>(hyp.size()),
                    static_cast<double>(ref.size()));
}

inline RougeScore rouge_n(const Tokens& hyp, const Tokens& ref, std::size_t n) {
  return rouge_n<std::string>(hyp, ref, n);
}
inline RougeScore rouge_l(const Tokens& hyp, const Tokens& ref) {
  return rouge_l<std::string>(hyp, ref);
}

Tokens concatenate(const std::vector<Tokens>& sentences);

enum class RougeKind { kRouge1, kRouge2, kRougeL };

// Concatenates each side in order, then applies the sentence-level scorer.
RougeScore rouge_summary(const std::vector<Tokens>& hyp_sents,
                         const std::vector<Tokens>& ref_sents, RougeKind kind);

// Fraction of distinct summary n-grams that do not occur in the document.
// N-grams are taken within sentences on both sides. Returns 0 when the
// summary has no n-grams.
double novel_ngram_ratio(const std::vector<Tokens>& summary_sents,
                         const Document& document, std::size_t n);

// total n-grams minus distinct n-grams of a token sequence.
template <class T>
std::size_t repeated_ngram_count(std::span<const T> tokens, std::size_t n) {
  if (tokens.size() < n) return 0;
  const auto counts = ngram_counts(tokens, n);
  return tokens.size() - n + 1 - counts.size();
}

// True when appending `next` to `prefix` forms a trigram already present in
// `prefix`.
template <class T>
bool creates_repeated_trigram(std::span<const T> prefix, const T& next) {
  const std::size_t n = prefix.size();
  if (n < 2) return false;
  const T& a = prefix[n - 2];
  const T& b = prefix[n - 1];
  for (std::size_t i = 0; i + 2 < n; ++i) {
    if (prefix[i] == a && prefix[i + 1] == b && prefix[i + 2] == next) return true;
  }
  return false;
}

// Light suffix stripper for the evaluation path ("-ing", "-ed", "-es", "-s",
// "-ly"). The reward path never stems.
std::string simple_stem(const std::string& word);
Tokens stem_tokens(const Tokens& tokens);

}  // namespace summ
